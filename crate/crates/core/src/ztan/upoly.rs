//! Dense univariate polynomials over Q and their roots.
//!
//! Roots are certified in layers: rational roots are found by
//! continued-fraction reconstruction of numeric roots and confirmed by exact
//! evaluation; irreducible quadratics yield exact surds; anything left is
//! reported numerically with a residual check.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{rat, Poly, Var};
use crate::error::{Error, Result};
use crate::mathf;

/// Coefficients in ascending order, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    c: Vec<BigRational>,
}

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::new(vec![BigRational::one()])
    }

    /// `x - a`.
    pub fn linear_root(a: &BigRational) -> Self {
        UPoly::new(vec![-a.clone(), BigRational::one()])
    }

    /// Extracts a polynomial in `v`; fails if other variables occur.
    pub fn from_poly(p: &Poly, v: Var) -> Option<Self> {
        if p.variables().iter().any(|w| *w != v) {
            return None;
        }
        let deg = p.degree(v).unwrap_or(0) as usize;
        let mut c = vec![BigRational::zero(); deg + 1];
        for (e, x) in p.terms() {
            c[e[v as usize] as usize] = x.clone();
        }
        Some(UPoly::new(c))
    }

    pub fn to_poly(&self, v: Var) -> Poly {
        Poly::univariate(v, &self.c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading().recip();
        UPoly::new(self.c.iter().map(|x| x * &l).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, k| acc * x + k)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + to_f64(k))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * rat(k as i64))
                .collect(),
        )
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let mut q = vec![BigRational::zero(); self.c.len() - dd];
        let lead = d.leading();
        for k in (0..q.len()).rev() {
            let f = &r[k + dd] / &lead;
            if !f.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &f * dj;
                }
            }
            q[k] = f;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = lc * prod f_i^i`, returned
    /// as monic `(f_i, i)` with non-constant `f_i`.
    pub fn square_free(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let c = df.div_exact(&a0).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            let c = d.div_exact(&a).expect("gcd divides");
            b = b.div_exact(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Sum of coefficient magnitudes weighted by `|z|^k`.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.c
            .iter()
            .enumerate()
            .map(|(k, x)| mathf::abs(to_f64(x)) * mathf::powi(r, k as i64))
            .sum()
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly(Var::Zn).to_string().replace("Zn", "Z"))
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({self})")
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Location of a root.
#[derive(Debug, Clone, PartialEq)]
pub enum RootValue {
    Rational(BigRational),
    /// `a + b * sqrt(d)` with `d` not a rational square; `d < 0` is complex.
    Surd {
        a: BigRational,
        b: BigRational,
        d: BigRational,
    },
    /// Numerically located root of a factor of degree three or more.
    Approx(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub value: RootValue,
    pub multiplicity: usize,
}

impl RootValue {
    pub fn approx(&self) -> Complex64 {
        match self {
            RootValue::Rational(q) => Complex64::new(to_f64(q), 0.0),
            RootValue::Surd { a, b, d } => {
                let s = mathf::sqrt(mathf::abs(to_f64(d)));
                if d.is_negative() {
                    Complex64::new(to_f64(a), to_f64(b) * s)
                } else {
                    Complex64::new(to_f64(a) + to_f64(b) * s, 0.0)
                }
            }
            RootValue::Approx(z) => *z,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RootValue::Approx(_))
    }

    pub fn equals_rational(&self, q: &BigRational) -> bool {
        matches!(self, RootValue::Rational(x) if x == q)
    }

    /// Compares `|root|` with 1; exact for rational and surd roots.
    pub fn cmp_unit_circle(&self) -> Ordering {
        match self {
            RootValue::Rational(q) => q.abs().cmp(&BigRational::one()),
            RootValue::Surd { a, b, d } => {
                if d.is_negative() {
                    (a * a - b * b * d).cmp(&BigRational::one())
                } else {
                    // |v| < 1 iff v - 1 < 0 and v + 1 > 0
                    let one = BigRational::one();
                    let above = surd_sign(&(a - &one), b, d);
                    let below = surd_sign(&(a + &one), b, d);
                    if above == Ordering::Less && below == Ordering::Greater {
                        Ordering::Less
                    } else if above == Ordering::Equal || below == Ordering::Equal {
                        Ordering::Equal
                    } else {
                        Ordering::Greater
                    }
                }
            }
            RootValue::Approx(z) => {
                let m = z.norm();
                if mathf::abs(m - 1.0) <= 1e-12 {
                    Ordering::Equal
                } else if m < 1.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Real and strictly negative.
    pub fn is_negative_real(&self) -> bool {
        match self {
            RootValue::Rational(q) => q.is_negative(),
            RootValue::Surd { a, b, d } => !d.is_negative() && surd_sign(a, b, d) == Ordering::Less,
            RootValue::Approx(z) => mathf::abs(z.im) <= 1e-12 * z.norm().max(1.0) && z.re < 0.0,
        }
    }
}

/// Sign of `x + y sqrt(d)` for `d > 0`.
fn surd_sign(x: &BigRational, y: &BigRational, d: &BigRational) -> Ordering {
    let sx = x.cmp(&BigRational::zero());
    let sy = y.cmp(&BigRational::zero());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    // opposite signs: compare magnitudes
    match (x * x).cmp(&(y * y * d)) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootValue::Rational(q) => write!(f, "{q}"),
            RootValue::Surd { a, b, d } => {
                let sign = if b.is_negative() { "-" } else { "+" };
                let mag = b.abs();
                let coef = if mag.is_one() {
                    String::new()
                } else {
                    format!("{mag}*")
                };
                if d.is_negative() {
                    write!(f, "{a} {sign} {coef}i*sqrt({})", -d.clone())?;
                } else {
                    write!(f, "{a} {sign} {coef}sqrt({d})")?;
                }
                let z = self.approx();
                write!(f, " (~{:.6}{:+.6}i)", z.re, z.im)
            }
            RootValue::Approx(z) => write!(f, "~{:.12}{:+.12}i", z.re, z.im),
        }
    }
}

/// Exact square root of a non-negative rational, if it has one.
fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// Best rational approximations of `x` with denominator up to `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut v = x;
    for _ in 0..40 {
        let a = mathf::floor(v);
        if mathf::abs(a) > 1e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    out
}

/// Aberth–Ehrlich simultaneous iteration followed by Newton polishing.
fn numeric_roots(p: &UPoly) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let m = p.monic();
    let c: Vec<f64> = m.c.iter().map(to_f64).collect();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |a, x| a.max(mathf::abs(*x)));
    let radius = bound.min(1e6) * 0.5 + 0.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::new(radius * libm::cos(t), radius * libm::sin(t))
        })
        .collect();
    let dp = m.derivative();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let pv = m.eval_complex(z[i]);
            let dv = dp.eval_complex(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let step = m.eval_complex(*zi) / dp.eval_complex(*zi);
            if step.is_finite() {
                *zi -= step;
            }
        }
        if mathf::abs(zi.im) <= 1e-14 * zi.norm().max(1.0) {
            zi.im = 0.0;
        }
    }
    z
}

/// All roots of `p` with multiplicities.
pub fn roots(p: &UPoly) -> Result<Vec<Root>> {
    let mut out = Vec::new();
    for (factor, mult) in p.square_free() {
        let mut rest = factor;
        // zero is handled directly so continued fractions never see it
        while rest.degree().unwrap_or(0) > 0 && rest.c[0].is_zero() {
            out.push(Root {
                value: RootValue::Rational(BigRational::zero()),
                multiplicity: mult,
            });
            rest = rest
                .div_exact(&UPoly::linear_root(&BigRational::zero()))
                .expect("root");
        }
        let max_den = integer_leading(&rest).min(BigInt::from(1_000_000_000i64));
        let max_den = max_den.to_i64().unwrap_or(1_000_000_000);
        for z in numeric_roots(&rest) {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            if mathf::abs(z.im) > 1e-8 * z.norm().max(1.0) {
                continue;
            }
            for q in convergents(z.re, max_den.max(1)).into_iter().rev() {
                if rest.eval(&q).is_zero() {
                    rest = rest.div_exact(&UPoly::linear_root(&q)).expect("exact root");
                    out.push(Root {
                        value: RootValue::Rational(q),
                        multiplicity: mult,
                    });
                    break;
                }
            }
        }
        match rest.degree() {
            Some(0) | None => {}
            Some(1) => {
                let m = rest.monic();
                out.push(Root {
                    value: RootValue::Rational(-m.c[0].clone()),
                    multiplicity: mult,
                });
            }
            Some(2) => {
                let m = rest.monic();
                let half_p = &m.c[1] / rat(2);
                let disc = &half_p * &half_p - &m.c[0];
                let a = -half_p;
                if let Some(s) = rational_sqrt(&disc) {
                    for v in [&a + &s, &a - &s] {
                        out.push(Root {
                            value: RootValue::Rational(v),
                            multiplicity: mult,
                        });
                    }
                } else {
                    for b in [rat(1), rat(-1)] {
                        out.push(Root {
                            value: RootValue::Surd {
                                a: a.clone(),
                                b,
                                d: disc.clone(),
                            },
                            multiplicity: mult,
                        });
                    }
                }
            }
            Some(_) => {
                for z in numeric_roots(&rest) {
                    let res = rest.eval_complex(z).norm();
                    let scale = rest.magnitude_at(z);
                    if !(res <= 1e-12 * scale) {
                        return Err(Error::NumericalFailure {
                            reason: format!("root {z} of {rest} failed the residual check"),
                            residual: res,
                            condition_estimate: scale,
                        });
                    }
                    out.push(Root {
                        value: RootValue::Approx(z),
                        multiplicity: mult,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Leading coefficient after scaling to a primitive integer polynomial.
fn integer_leading(p: &UPoly) -> BigInt {
    let lcm = p.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = p.c.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return BigInt::one();
    }
    (ints.last().cloned().unwrap_or_else(BigInt::one) / g).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        super::super::poly::ratio(n, d)
    }

    #[test]
    fn gcd_and_square_free() {
        // (x-1)^2 (x+1)^3 (x^2+4x+1)
        let a = UPoly::from_ints(&[-1, 1]);
        let b = UPoly::from_ints(&[1, 1]);
        let c = UPoly::from_ints(&[1, 4, 1]);
        let p = a.mul(&a).mul(&b).mul(&b).mul(&b).mul(&c);
        let sf = p.square_free();
        assert_eq!(sf, vec![(c.clone(), 1), (a.clone(), 2), (b.clone(), 3)]);
        assert_eq!(p.gcd(&a.mul(&c)), a.mul(&c));
    }

    #[test]
    fn surd_roots_of_galerkin_numerator() {
        let r = roots(&UPoly::from_ints(&[1, 4, 1])).unwrap();
        assert_eq!(r.len(), 2);
        let want = [-2.0 + 3f64.sqrt(), -2.0 - 3f64.sqrt()];
        for (root, w) in r.iter().zip(want) {
            assert!(matches!(root.value, RootValue::Surd { .. }));
            assert!((root.value.approx().re - w).abs() < 1e-15);
        }
        assert_eq!(r[0].value.cmp_unit_circle(), Ordering::Less);
        assert_eq!(r[1].value.cmp_unit_circle(), Ordering::Greater);
        assert_eq!(
            r[0].value.to_string().split(' ').take(3).collect::<Vec<_>>(),
            ["-2", "+", "sqrt(3)"]
        );
    }

    #[test]
    fn rational_roots_are_exact() {
        // (3x + 1)(x - 7/2)(x^2 + 1)
        let p = UPoly::new(vec![q(1, 1), q(3, 1)])
            .mul(&UPoly::new(vec![q(-7, 2), q(1, 1)]))
            .mul(&UPoly::from_ints(&[1, 0, 1]));
        let r = roots(&p).unwrap();
        assert!(r.iter().any(|x| x.value.equals_rational(&q(-1, 3))));
        assert!(r.iter().any(|x| x.value.equals_rational(&q(7, 2))));
        let complex: Vec<_> = r
            .iter()
            .filter(|x| matches!(x.value, RootValue::Surd { .. }))
            .collect();
        assert_eq!(complex.len(), 2);
        assert_eq!(complex[0].value.cmp_unit_circle(), Ordering::Equal);
    }

    #[test]
    fn numeric_fallback_checks_residual() {
        // x^3 - 2 has no rational roots
        let r = roots(&UPoly::from_ints(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| matches!(x.value, RootValue::Approx(_))));
        let real = r.iter().find(|x| x.value.approx().im == 0.0).unwrap();
        assert!((real.value.approx().re - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_root_multiplicity() {
        let r = roots(&UPoly::from_ints(&[0, 0, -1, 1])).unwrap();
        assert!(r
            .iter()
            .any(|x| x.value.equals_rational(&q(0, 1)) && x.multiplicity == 2));
        assert!(r.iter().any(|x| x.value.equals_rational(&q(1, 1))));
    }

    proptest! {
        #[test]
        fn rebuilt_from_rational_roots(rs in proptest::collection::vec((-9i64..=9, 1i64..=5), 1..5)) {
            let mut p = UPoly::one();
            for (n, d) in &rs {
                p = p.mul(&UPoly::linear_root(&q(*n, *d)));
            }
            let found = roots(&p).unwrap();
            let total: usize = found.iter().map(|r| r.multiplicity).sum();
            prop_assert_eq!(total, rs.len());
            for (n, d) in &rs {
                let want = q(*n, *d);
                prop_assert!(found.iter().any(|r| r.value.equals_rational(&want)));
            }
        }

        #[test]
        fn gcd_divides_both(a in proptest::collection::vec(-4i64..=4, 1..5),
                            b in proptest::collection::vec(-4i64..=4, 1..5),
                            c in proptest::collection::vec(-4i64..=4, 1..4)) {
            let (a, b, c) = (UPoly::from_ints(&a), UPoly::from_ints(&b), UPoly::from_ints(&c));
            prop_assume!(!c.is_zero() && !(a.is_zero() && b.is_zero()));
            let (x, y) = (a.mul(&c), b.mul(&c));
            let g = x.gcd(&y);
            if !g.is_zero() {
                prop_assert!(x.div_exact(&g).is_some());
                prop_assert!(y.div_exact(&g).is_some());
                prop_assert!(g.div_exact(&c.monic()).is_some() || x.is_zero() || y.is_zero());
            }
        }
    }
}
