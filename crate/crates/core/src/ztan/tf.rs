//! Z-domain transfer functions `A_y / B_x` of the discrete schemes.

use alloc::format;

use num_rational::BigRational;

use super::poly::{c, pe, rat, zn, Poly, Var};
use super::polys::PolySet;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::model::Scheme;

/// Peclet number for the analyzer: an exact rational or the symbolic
/// `Pe -> infinity` limit.
#[derive(Debug, Clone, PartialEq)]
pub enum PecletValue {
    Finite(BigRational),
    Infinite,
}

impl PecletValue {
    pub fn from_f64(pe: f64) -> Result<Self> {
        if pe.is_infinite() && pe > 0.0 {
            return Ok(PecletValue::Infinite);
        }
        BigRational::from_float(pe)
            .map(PecletValue::Finite)
            .ok_or_else(|| Error::invalid("Peclet number must be finite"))
    }
}

/// Numerator and denominator of the 1D scheme with `Pe` left symbolic:
/// `(Pe-1) Z^2 + 2 Z - (1+Pe)` against `2 Pe dz/6 (Z^2+4Z+1)` (Galerkin) or
/// `2 Pe dz/4 (Z+1)^2` (element-averaged).
pub fn tf_1d_symbolic(scheme: Scheme, dz: &BigRational) -> (Poly, Poly) {
    let z = zn();
    let den = &(&(&(&pe() - &c(1)) * &(&z * &z)) + &(&c(2) * &z)) - &(&pe() + &c(1));
    let num = match scheme {
        Scheme::Galerkin => {
            let w = &(&(&z * &z) + &(&c(4) * &z)) + &c(1);
            (&pe() * &w).scale(&(dz * BigRational::new(2.into(), 6.into())))
        }
        Scheme::ElementAveraged => {
            let w = (&z + &c(1)).pow(2);
            (&pe() * &w).scale(&(dz * BigRational::new(2.into(), 4.into())))
        }
    };
    (num, den)
}

/// 1D transfer function in `Z` (represented by `Zn`), with the denominator
/// normalized to be monic. Not reduced; see [`RationalFunction::reduced`].
pub fn tf_1d(scheme: Scheme, pe_value: &PecletValue, dz: &BigRational) -> Result<RationalFunction> {
    let (num, den) = tf_1d_symbolic(scheme, dz);
    let (num, den) = match pe_value {
        PecletValue::Finite(p) => {
            let n = num.substitute(Var::Pe, p);
            let d = den.substitute(Var::Pe, p);
            if d.degree(Var::Zn) != Some(2) {
                return Err(Error::SingularNormalization {
                    unreduced: format!("({n}) / ({d})"),
                });
            }
            (n, d)
        }
        PecletValue::Infinite => leading_ratio(&num, &den)?,
    };
    let (lc, den) = den.monic();
    RationalFunction::new(num.scale(&lc.recip()), den)
}

/// Ratio of the coefficients of the highest power of `Pe` when numerator and
/// denominator have equal degree in `Pe`.
fn leading_ratio(num: &Poly, den: &Poly) -> Result<(Poly, Poly)> {
    let dn = num.degree(Var::Pe).unwrap_or(0);
    let dd = den.degree(Var::Pe).unwrap_or(0);
    if dn > dd {
        return Err(Error::OutOfValidity(
            "transfer function diverges as Pe grows".into(),
        ));
    }
    if dn < dd {
        return Ok((Poly::zero(), den.leading_in(Var::Pe)));
    }
    Ok((num.leading_in(Var::Pe), den.leading_in(Var::Pe)))
}

/// Large-`Pe` form of the 2D transfer function: `A_y/B_x ~ Pe^pe_power * tf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingOrder {
    pub pe_power: i32,
    /// Reduced by exact GCD.
    pub tf: RationalFunction,
    /// Leading-in-Pe numerator and denominator before reduction.
    pub unreduced: RationalFunction,
    /// The factor cancelled by the reduction.
    pub cancelled: Poly,
    /// `Pe` degrees of the full Cramer numerator and denominator.
    pub degrees: (u32, u32),
}

/// The three Z-domain equations on a uniform all-conductor grid, in the
/// unknowns `(psi, A_y, A_z)` with `psi = Pe phi / (6 u_z)`:
///
/// ```text
///   Q2 psi                          - S1/3 A_z       = 0
///   2 S1 psi + Pe S2/4 A_y          - Pe S3/6 A_z    = rhs_phi B
///   Q1 psi + (-S1/3 + Pe Q2/6) A_y  - Pe Q1/6 A_z    = rhs_ay  B
/// ```
pub fn system_2d(scheme: Scheme, p: &PolySet, dz: &BigRational) -> ([[Poly; 3]; 3], [Poly; 3]) {
    let third = BigRational::new(1.into(), 3.into());
    let pe = pe();
    let m = [
        [p.q2.clone(), Poly::zero(), -p.s1.scale(&third)],
        [
            p.s1.scale(&rat(2)),
            (&pe * &p.s2).scale(&BigRational::new(1.into(), 4.into())),
            -(&pe * &p.s3).scale(&BigRational::new(1.into(), 6.into())),
        ],
        [
            p.q1.clone(),
            &(-p.s1.scale(&third)) + &(&pe * &p.q2).scale(&BigRational::new(1.into(), 6.into())),
            -(&pe * &p.q1).scale(&BigRational::new(1.into(), 6.into())),
        ],
    ];
    let (rb, rc) = match scheme {
        Scheme::Galerkin => (
            (&pe * &p.q1).scale(&(dz * BigRational::new(1.into(), 12.into()))),
            (&pe * &p.m1).scale(&(dz * BigRational::new(1.into(), 18.into()))),
        ),
        Scheme::ElementAveraged => (
            (&pe * &p.r1).scale(&(dz * BigRational::new(1.into(), 8.into()))),
            (&pe * &p.n1).scale(&(dz * BigRational::new(1.into(), 8.into()))),
        ),
    };
    (m, [Poly::zero(), rb, rc])
}

pub fn det3(m: &[[Poly; 3]; 3]) -> Poly {
    let minor = |a: usize, b: usize, c2: usize, d: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][c2] * &m[2][d]);
    let t0 = &m[0][0] * &minor(1, 2, 2, 1);
    let t1 = &m[0][1] * &minor(0, 2, 2, 0);
    let t2 = &m[0][2] * &minor(0, 1, 1, 0);
    &(&t0 - &t1) + &t2
}

/// Cramer numerator and denominator of `A_y / B_x`, `Pe` symbolic.
pub fn cramer_2d(scheme: Scheme, p: &PolySet, dz: &BigRational) -> (Poly, Poly) {
    let (m, rhs) = system_2d(scheme, p, dz);
    let den = det3(&m);
    let mut my = m.clone();
    for i in 0..3 {
        my[i][1] = rhs[i].clone();
    }
    (det3(&my), den)
}

/// Leading large-`Pe` behaviour of the eliminated 2D system.
pub fn tf_2d(scheme: Scheme, p: &PolySet, dz: &BigRational) -> Result<LeadingOrder> {
    let (num, den) = cramer_2d(scheme, p, dz);
    if den.is_zero() {
        return Err(Error::StructuralFailure {
            what: "system determinant vanishes identically".into(),
            remainder: "0".into(),
        });
    }
    let dn = num.degree(Var::Pe).unwrap_or(0);
    let dd = den.degree(Var::Pe).unwrap_or(0);
    let unreduced = RationalFunction::new(num.leading_in(Var::Pe), den.leading_in(Var::Pe))?;
    let tf = unreduced.reduced()?;
    let cancelled = unreduced.common_factor()?;
    Ok(LeadingOrder {
        pe_power: dn as i32 - dd as i32,
        tf,
        unreduced,
        cancelled,
        degrees: (dn, dd),
    })
}

/// The large-`Pe` shortcut that drops `O(1)` terms before eliminating:
/// `(dz/3)(2 S3 M1 - 3 Q1^2) / (2 S3 Q2 - 3 Q1 S2)` for Galerkin and
/// `(3 dz/2)(S3 N1 - Q1 R1) / (2 S3 Q2 - 3 Q1 S2)` for the averaged scheme.
/// Not reduced, so a vanishing numerator stays visible.
pub fn tf_2d_shortcut(scheme: Scheme, p: &PolySet, dz: &BigRational) -> Result<RationalFunction> {
    let den = &(&p.s3 * &p.q2).scale(&rat(2)) - &(&p.q1 * &p.s2).scale(&rat(3));
    let num = match scheme {
        Scheme::Galerkin => (&(&p.s3 * &p.m1).scale(&rat(2)) - &(&p.q1 * &p.q1).scale(&rat(3)))
            .scale(&(dz * BigRational::new(1.into(), 3.into()))),
        Scheme::ElementAveraged => {
            (&(&p.s3 * &p.n1) - &(&p.q1 * &p.r1)).scale(&(dz * BigRational::new(3.into(), 2.into())))
        }
    };
    RationalFunction::new(num, den)
}

/// `true` if the two rational functions are equal as functions.
pub fn same_function(a: &RationalFunction, b: &RationalFunction) -> bool {
    (&a.num * &b.den) == (&b.num * &a.den)
}

#[cfg(test)]
mod tests {
    use super::super::analysis::{analyze, Analysis, Classification};
    use super::super::poly::{ratio, zm};
    use super::super::polys::{polys_2d, quad_n};
    use super::*;

    fn univariate(rf: &RationalFunction) -> super::super::analysis::PoleZeroReport {
        match analyze(rf).unwrap() {
            Analysis::Univariate(r) => r,
            other => panic!("expected univariate, got {other:?}"),
        }
    }

    #[test]
    fn galerkin_limit_has_pole_at_minus_one() {
        let rf = tf_1d(Scheme::Galerkin, &PecletValue::Infinite, &rat(1)).unwrap();
        let r = univariate(&rf);
        assert!(r.has_pole_at(&rat(1)) && r.has_pole_at(&rat(-1)));
        assert_eq!(r.classification, Classification::OscillatoryMarginal);
        assert_eq!(r.gain, ratio(1, 3));
        let zs: alloc::vec::Vec<f64> = r.zeros.iter().map(|z| z.value.approx().re).collect();
        assert!((zs[0] + 0.27).abs() < 0.005 && (zs[1] + 3.73).abs() < 0.005);
    }

    #[test]
    fn averaged_limit_cancels() {
        let dz = ratio(1, 5);
        let rf = tf_1d(Scheme::ElementAveraged, &PecletValue::Infinite, &dz).unwrap();
        let r = univariate(&rf);
        assert!(r.cancelled_at(&rat(-1)));
        assert_eq!(r.poles.len(), 1);
        assert!(r.has_pole_at(&rat(1)));
        assert!(r.has_zero_at(&rat(-1)));
        assert_eq!(r.gain, ratio(1, 10));
        assert_eq!(r.classification, Classification::MarginallyStable);
    }

    #[test]
    fn finite_pe_roots() {
        let r = univariate(&tf_1d(Scheme::ElementAveraged, &PecletValue::Finite(rat(2)), &rat(1)).unwrap());
        assert!(r.has_pole_at(&rat(-3)) && r.has_pole_at(&rat(1)));
        assert_eq!(r.classification, Classification::Unstable);
        assert!(r.oscillatory);
        let err = tf_1d(Scheme::Galerkin, &PecletValue::Finite(rat(1)), &rat(1)).unwrap_err();
        assert!(matches!(err, Error::SingularNormalization { .. }));
    }

    #[test]
    fn galerkin_2d_leading_order() {
        let lo = tf_2d(Scheme::Galerkin, &polys_2d(), &rat(1)).unwrap();
        assert_eq!(lo.pe_power, 0);
        let want =
            RationalFunction::new(quad_n().scale(&ratio(1, 3)), &(&zn() - &c(1)) * &(&zn() + &c(1))).unwrap();
        assert!(same_function(&lo.tf, &want));
        let short = tf_2d_shortcut(Scheme::Galerkin, &polys_2d(), &rat(1)).unwrap();
        assert!(same_function(&short, &lo.tf));
    }

    #[test]
    fn averaged_2d_leading_order() {
        let p = polys_2d();
        let lo = tf_2d(Scheme::ElementAveraged, &p, &rat(1)).unwrap();
        assert_eq!(lo.pe_power, -1);
        let want = RationalFunction::new(
            (&(&zm() + &c(1)).pow(2) * &p.s1).scale(&rat(3)),
            &(&zm() - &c(1)).pow(4) * &quad_n(),
        )
        .unwrap();
        assert!(same_function(&lo.tf, &want));
        assert!(tf_2d_shortcut(Scheme::ElementAveraged, &p, &rat(1))
            .unwrap()
            .num
            .is_zero());
    }
}
