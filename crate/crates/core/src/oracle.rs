//! Closed-form nodal solution of the 1D difference equation under a
//! rectangular pulse, and the peak-error formulas derived from it.
//!
//! The axis is split into five sub-domains: B (upstream, `m_b` intervals),
//! F (rising edge, 3 intervals), C (plateau, `m_c` intervals), G (falling
//! edge, 3 intervals) and D (downstream, `m_d` intervals). Neighbouring
//! domains share their junction node.
//!
//! Complementary solutions grow like `r^n` with `|r| > 1`, so the constants
//! are held in scaled form (`x_hat = x_2 r^{m_x}`) and every power that is
//! evaluated is `r^{n - m_x} <= 1` in magnitude.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mathf::{self, abs, compensated_sum, powi};
use crate::model::{FieldProfile, Mesh1D, Scheme};

/// Interval count of the rising and falling edge domains.
pub const EDGE_INTERVALS: usize = 3;

/// Sub-domain sizes, in intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PulseLayout {
    pub m_b: usize,
    pub m_c: usize,
    pub m_d: usize,
}

impl PulseLayout {
    pub fn new(m_b: usize, m_c: usize, m_d: usize) -> Result<Self> {
        if m_b == 0 || m_c < 2 || m_d == 0 {
            return Err(Error::invalid(
                "sub-domain counts must be positive (plateau at least 2)",
            ));
        }
        Ok(PulseLayout { m_b, m_c, m_d })
    }

    pub fn node_count(&self) -> usize {
        self.m_b + self.m_c + self.m_d + 2 * EDGE_INTERVALS + 1
    }

    /// First and last node carrying the applied field. The three-point load
    /// average makes the input ramp over F and G.
    pub fn pulse_nodes(&self) -> (usize, usize) {
        (self.m_b + 2, self.m_b + self.m_c + 4)
    }

    /// Last element of the plateau domain C, where the peak error sits.
    pub fn peak_element(&self) -> usize {
        self.m_b + EDGE_INTERVALS + self.m_c - 1
    }

    pub fn nodal_field(&self, amplitude: f64) -> Vec<f64> {
        let (lo, hi) = self.pulse_nodes();
        (0..self.node_count())
            .map(|n| if (lo..=hi).contains(&n) { amplitude } else { 0.0 })
            .collect()
    }

    pub fn mesh(&self, dz: f64) -> Result<Mesh1D> {
        Mesh1D::new(self.node_count(), dz)
    }

    /// Rectangular pulse whose node samples equal [`Self::nodal_field`].
    pub fn profile(&self, dz: f64, amplitude: f64) -> FieldProfile {
        let (lo, hi) = self.pulse_nodes();
        FieldProfile::RectPulse1D {
            a: lo as f64 * dz,
            b: hi as f64 * dz,
            amplitude,
        }
    }
}

/// Quartic particular solution `c4 n^4 + c3 n^3 + c2 n^2 + c1 n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub coeffs: [f64; 5],
}

impl Quartic {
    pub fn eval(&self, n: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * n + c)
    }
}

/// Particular solutions of the rising (F) and falling (G) edges.
pub fn edge_particulars(scheme: Scheme, r: f64, lambda: f64) -> (Quartic, Quartic) {
    let d1 = r - 1.0;
    let d2 = d1 * d1;
    let d3 = d2 * d1;
    let r2 = r * r;
    let r3 = r2 * r;
    match scheme {
        Scheme::Galerkin => {
            let c4 = lambda / 24.0;
            let c3 = lambda * (r - 2.0) / (6.0 * d1);
            let c2 = lambda * (r2 - 5.0) / (8.0 * d2);
            let f1 = -lambda * (r3 - 10.0 * r2 + 17.0 * r + 4.0) / (12.0 * d3);
            let g1 = lambda * (13.0 * r3 - 46.0 * r2 + 53.0 * r - 8.0) / (12.0 * d3);
            (
                Quartic {
                    coeffs: [0.0, f1, c2, c3, -c4],
                },
                Quartic {
                    coeffs: [0.0, g1, -c2, -c3, c4],
                },
            )
        }
        Scheme::ElementAveraged => {
            let c4 = lambda / 48.0;
            let c3 = lambda * (r - 2.0) / (12.0 * d1);
            let c2 = lambda * (7.0 * r2 - 8.0 * r - 11.0) / (48.0 * d2);
            let f1 = lambda * (r3 + 8.0 * r2 - 19.0 * r - 2.0) / (24.0 * d3);
            let g1 = lambda * (23.0 * r3 - 80.0 * r2 + 91.0 * r - 22.0) / (24.0 * d3);
            (
                Quartic {
                    coeffs: [0.0, f1, c2, c3, -c4],
                },
                Quartic {
                    coeffs: [0.0, g1, -c2, -c3, c4],
                },
            )
        }
    }
}

/// `r = (-1 - Pe) / (-1 + Pe)`.
pub fn ratio(pe: f64) -> f64 {
    (-1.0 - pe) / (-1.0 + pe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub pe: f64,
    pub r: f64,
    pub lambda: f64,
    pub amplitude: f64,
    pub dz: f64,
    pub layout: PulseLayout,
    pub scheme: Scheme,
}

/// Complementary-solution constants. `*_hat` are the scaled second
/// constants (`b_hat = b2 r^{m_b}`, `f_hat = f2 r^3`, `c_hat = c2 r^{m_c}`,
/// `g_hat = g2 r^3`); the raw `*2` values may underflow for long domains
/// and are informational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub b1: f64,
    pub b2: f64,
    pub f1: f64,
    pub f2: f64,
    pub c1: f64,
    pub c2: f64,
    pub g1: f64,
    pub g2: f64,
    pub d1: f64,
    pub d2: f64,
    pub b_hat: f64,
    pub f_hat: f64,
    pub c_hat: f64,
    pub g_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSolution {
    pub params: AnalyticParams,
    pub constants: Constants,
    pf: Quartic,
    pg: Quartic,
}

/// Which sub-domain a global node falls into, with its local index. Junction
/// nodes are assigned to the downstream domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    B(usize),
    F(usize),
    C(usize),
    G(usize),
    D(usize),
}

pub fn analytic_solve(
    pe: f64,
    dz: f64,
    amplitude: f64,
    m_b: usize,
    m_c: usize,
    m_d: usize,
    scheme: Scheme,
) -> Result<AnalyticSolution> {
    if !(pe > 1.0) || !pe.is_finite() {
        return Err(Error::OutOfValidity(format!(
            "closed form requires Pe > 1, got {pe}"
        )));
    }
    if !(dz > 0.0) {
        return Err(Error::invalid("element length must be positive"));
    }
    let layout = PulseLayout::new(m_b, m_c, m_d)?;
    let r = ratio(pe);
    let lambda = amplitude * dz;
    let (pf, pg) = edge_particulars(scheme, r, lambda);
    let pc = |n: usize| lambda * n as f64;
    let rm1 = r - 1.0;
    let ri = |k: usize| powi(r, -(k as i64));

    let g_hat = r * (pg.eval(2.0) - pg.eval(3.0)) / rm1;
    let c_hat = compensated_sum(&[
        r * (pc(m_c - 1) - pc(m_c)) / rm1,
        g_hat * ri(3),
        pg.eval(1.0) / rm1,
        lambda,
    ]);
    let f_hat = compensated_sum(&[
        r * (pf.eval(2.0) - pf.eval(3.0)) / rm1,
        c_hat * ri(m_c),
        pc(1) / rm1,
        lambda,
    ]);
    let b_hat = f_hat * ri(3) + pf.eval(1.0) / rm1;

    let b1 = -b_hat * ri(m_b);
    let f1 = compensated_sum(&[b1, b_hat, -f_hat * ri(3)]);
    let c1 = compensated_sum(&[f1, f_hat, pf.eval(3.0), -c_hat * ri(m_c)]);
    let g1 = compensated_sum(&[c1, c_hat, pc(m_c), -g_hat * ri(3)]);
    let d1 = compensated_sum(&[g1, g_hat, pg.eval(3.0)]);

    let constants = Constants {
        b1,
        b2: b_hat * ri(m_b),
        f1,
        f2: f_hat * ri(3),
        c1,
        c2: c_hat * ri(m_c),
        g1,
        g2: g_hat * ri(3),
        d1,
        d2: 0.0,
        b_hat,
        f_hat,
        c_hat,
        g_hat,
    };
    Ok(AnalyticSolution {
        params: AnalyticParams {
            pe,
            r,
            lambda,
            amplitude,
            dz,
            layout,
            scheme,
        },
        constants,
        pf,
        pg,
    })
}

impl AnalyticSolution {
    fn rel(&self, n: usize, m: usize) -> f64 {
        powi(self.params.r, n as i64 - m as i64)
    }

    pub fn y_b(&self, n: usize) -> f64 {
        let c = &self.constants;
        c.b1 + c.b_hat * self.rel(n, self.params.layout.m_b)
    }

    pub fn y_f(&self, n: usize) -> f64 {
        let c = &self.constants;
        compensated_sum(&[
            c.f1,
            c.f_hat * self.rel(n, EDGE_INTERVALS),
            self.pf.eval(n as f64),
        ])
    }

    pub fn y_c(&self, n: usize) -> f64 {
        let c = &self.constants;
        compensated_sum(&[
            c.c1,
            c.c_hat * self.rel(n, self.params.layout.m_c),
            self.params.lambda * n as f64,
        ])
    }

    pub fn y_g(&self, n: usize) -> f64 {
        let c = &self.constants;
        compensated_sum(&[
            c.g1,
            c.g_hat * self.rel(n, EDGE_INTERVALS),
            self.pg.eval(n as f64),
        ])
    }

    pub fn y_d(&self, _n: usize) -> f64 {
        self.constants.d1
    }

    pub fn node_count(&self) -> usize {
        self.params.layout.node_count()
    }

    pub fn domain_of(&self, node: usize) -> Domain {
        let l = self.params.layout;
        let f0 = l.m_b;
        let c0 = f0 + EDGE_INTERVALS;
        let g0 = c0 + l.m_c;
        let d0 = g0 + EDGE_INTERVALS;
        if node < f0 {
            Domain::B(node)
        } else if node < c0 {
            Domain::F(node - f0)
        } else if node < g0 {
            Domain::C(node - c0)
        } else if node < d0 {
            Domain::G(node - g0)
        } else {
            Domain::D(node - d0)
        }
    }

    pub fn value_at(&self, node: usize) -> f64 {
        match self.domain_of(node) {
            Domain::B(n) => self.y_b(n),
            Domain::F(n) => self.y_f(n),
            Domain::C(n) => self.y_c(n),
            Domain::G(n) => self.y_g(n),
            Domain::D(n) => self.y_d(n),
        }
    }

    pub fn nodal(&self) -> Vec<f64> {
        (0..self.node_count()).map(|n| self.value_at(n)).collect()
    }

    /// Residual of the difference equation at every interior node plus the
    /// outlet condition `y(N) = y(N-1)`, in units of the element load.
    pub fn residuals(&self) -> Vec<f64> {
        let p = &self.params;
        let y = self.nodal();
        let b = p.layout.nodal_field(p.amplitude);
        let pe = p.pe;
        let n = y.len();
        let mut out = Vec::with_capacity(n - 1);
        for i in 1..n - 1 {
            let weighted = match p.scheme {
                Scheme::Galerkin => (b[i - 1] + 4.0 * b[i] + b[i + 1]) / 6.0,
                Scheme::ElementAveraged => (b[i - 1] + 2.0 * b[i] + b[i + 1]) / 4.0,
            };
            let lhs = compensated_sum(&[
                (-1.0 - pe) * y[i - 1],
                2.0 * y[i],
                (-1.0 + pe) * y[i + 1],
                -2.0 * pe * p.dz * weighted,
            ]);
            out.push(lhs / (1.0 + pe));
        }
        out.push(y[n - 1] - self.y_d(p.layout.m_d + 1));
        out
    }

    /// Peak error from the plateau constant: `c2 (r^{m_c-1} - r^{m_c}) / dz`.
    pub fn eq34_error(&self) -> f64 {
        self.constants.c_hat * (1.0 / self.params.r - 1.0) / self.params.dz
    }

    /// Element reaction field of the closed form.
    pub fn reaction(&self) -> Vec<f64> {
        crate::fem1d::differentiate(&self.nodal(), self.params.dz)
    }
}

/// Closed-form peak error in the plateau, valid for `Pe >= 1`.
pub fn peak_error(scheme: Scheme, pe: f64, amplitude: f64) -> Result<f64> {
    if !(pe >= 1.0) || !pe.is_finite() {
        return Err(Error::OutOfValidity(format!(
            "peak-error formula requires Pe >= 1, got {pe}"
        )));
    }
    let d = (1.0 + pe) * (1.0 + pe) * (1.0 + pe);
    Ok(match scheme {
        Scheme::ElementAveraged => amplitude * (1.0 - pe) / d,
        Scheme::Galerkin => amplitude * (pe * pe - 3.0) * (pe - 1.0) / (3.0 * d),
    })
}

/// Same formulas written in `r`, as they fall out of the plateau constant.
pub fn peak_error_in_r(scheme: Scheme, pe: f64, amplitude: f64) -> Result<f64> {
    if !(pe > 1.0) {
        return Err(Error::OutOfValidity(format!("requires Pe > 1, got {pe}")));
    }
    let r = ratio(pe);
    Ok(match scheme {
        Scheme::ElementAveraged => amplitude * (r * r + 2.0 * r + 1.0) / (4.0 * r * r * r),
        Scheme::Galerkin => amplitude * (r * r + 4.0 * r + 1.0) / (6.0 * r * r * r),
    })
}

/// Location and nature of the extreme peak error over `Pe > 1`, per unit
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extremum {
    /// `|error|` attains its maximum at an interior Peclet number.
    Interior { pe: f64, error: f64 },
    /// `|error|` grows monotonically toward `limit` as `Pe -> inf`, after an
    /// optional small local extremum.
    Supremum { limit: f64, local: Option<(f64, f64)> },
}

/// Critical points come from bisection on the exact derivative numerators:
/// `2 Pe - 4` for the averaged scheme and `4 (Pe^2 + Pe - 3)` for Galerkin.
pub fn error_extremum(scheme: Scheme) -> Extremum {
    let root = |f: &dyn Fn(f64) -> f64| bisect(f, 1.0, 10.0, 1e-13);
    match scheme {
        Scheme::ElementAveraged => {
            let pe = root(&|p| 2.0 * p - 4.0);
            Extremum::Interior {
                pe,
                error: peak_error(scheme, pe, 1.0).unwrap_or(f64::NAN),
            }
        }
        Scheme::Galerkin => {
            let pe = root(&|p| p * p + p - 3.0);
            Extremum::Supremum {
                limit: 1.0 / 3.0,
                local: Some((pe, peak_error(scheme, pe, 1.0).unwrap_or(f64::NAN))),
            }
        }
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization of `|peak_error|` over `[lo, hi]`; an
/// independent check on [`error_extremum`].
pub fn golden_section_max(scheme: Scheme, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let g = |p: f64| abs(peak_error(scheme, p, 1.0).unwrap_or(0.0));
    let phi = (mathf::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    while b - a > tol {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    let p = 0.5 * (a + b);
    (p, g(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn averaged_peak_at_pe_two() {
        assert_relative_eq!(
            peak_error(Scheme::ElementAveraged, 2.0, 1.0).unwrap(),
            -1.0 / 27.0,
            max_relative = 1e-15
        );
        assert_eq!(peak_error(Scheme::ElementAveraged, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(peak_error(Scheme::Galerkin, 1.0, 1.0).unwrap(), 0.0);
        match error_extremum(Scheme::ElementAveraged) {
            Extremum::Interior { pe, error } => {
                assert!((pe - 2.0).abs() < 1e-10);
                assert_relative_eq!(error, -1.0 / 27.0, max_relative = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let (pe, err) = golden_section_max(Scheme::ElementAveraged, 1.0, 100.0, 1e-9);
        assert!((pe - 2.0).abs() < 1e-6);
        assert_relative_eq!(err, 1.0 / 27.0, max_relative = 1e-10);
    }

    #[test]
    fn galerkin_grows_toward_one_third() {
        let e = peak_error(Scheme::Galerkin, 1e6, 1.0).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-5);
        match error_extremum(Scheme::Galerkin) {
            Extremum::Supremum {
                limit,
                local: Some((pe, err)),
            } => {
                assert_eq!(limit, 1.0 / 3.0);
                assert!((pe - (13f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
                assert!(err < 0.0 && err > -0.02);
            }
            other => panic!("unexpected {other:?}"),
        }
        // monotone beyond the local extremum
        let mut prev = peak_error(Scheme::Galerkin, 1.31, 1.0).unwrap();
        let mut p = 1.31;
        while p < 1e4 {
            p *= 1.05;
            let e = peak_error(Scheme::Galerkin, p, 1.0).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn out_of_validity() {
        assert!(matches!(
            analytic_solve(1.0, 0.2, 1.0, 5, 5, 5, Scheme::Galerkin),
            Err(Error::OutOfValidity(_))
        ));
        assert!(matches!(
            analytic_solve(0.5, 0.2, 1.0, 5, 5, 5, Scheme::Galerkin),
            Err(Error::OutOfValidity(_))
        ));
        assert!(peak_error(Scheme::Galerkin, 0.9, 1.0).is_err());
    }

    #[test]
    fn boundary_conditions_and_junctions() {
        for scheme in Scheme::ALL {
            let s = analytic_solve(200.0, 0.2, 1.0, 38, 12, 38, scheme).unwrap();
            assert_eq!(s.value_at(0), 0.0);
            assert_eq!(s.constants.d2, 0.0);
            assert_relative_eq!(s.constants.b1, -s.constants.b2);
            let l = s.params.layout;
            let tol = 1e-12 * s.params.lambda * 30.0;
            assert!((s.y_b(l.m_b) - s.y_f(0)).abs() < tol);
            assert!((s.y_f(3) - s.y_c(0)).abs() < tol);
            assert!((s.y_c(l.m_c) - s.y_g(0)).abs() < tol);
            assert!((s.y_g(3) - s.y_d(0)).abs() < tol);
        }
    }

    #[test]
    fn printed_r_forms_agree() {
        for pe in [1.5, 2.0, 10.0, 100.0, 1000.0] {
            for scheme in Scheme::ALL {
                let a = peak_error(scheme, pe, 1.0).unwrap();
                let b = peak_error_in_r(scheme, pe, 1.0).unwrap();
                assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-3));
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_satisfies_difference_equation(
            pe in 1.05f64..5000.0, dz in 0.01f64..1.0, amp in 0.1f64..3.0,
            m_b in 1usize..60, m_c in 2usize..30, m_d in 1usize..60,
            averaged in proptest::bool::ANY,
        ) {
            let scheme = if averaged { Scheme::ElementAveraged } else { Scheme::Galerkin };
            let s = analytic_solve(pe, dz, amp, m_b, m_c, m_d, scheme).unwrap();
            for r in s.residuals() {
                prop_assert!(r.abs() <= 1e-9 * s.params.lambda, "residual {r}");
            }
        }

        #[test]
        fn eq34_matches_closed_forms(pe in 1.05f64..1000.0, m_c in 8usize..30,
                                     averaged in proptest::bool::ANY) {
            let scheme = if averaged { Scheme::ElementAveraged } else { Scheme::Galerkin };
            let s = analytic_solve(pe, 0.2, 1.0, 10, m_c, 10, scheme).unwrap();
            let want = peak_error(scheme, pe, 1.0).unwrap();
            prop_assert!((s.eq34_error() - want).abs() <= 1e-9 * want.abs() + 1e-13);
        }

        #[test]
        fn eq34_at_printed_peclet_numbers(m_c in 8usize..40, averaged in proptest::bool::ANY) {
            let scheme = if averaged { Scheme::ElementAveraged } else { Scheme::Galerkin };
            for pe in [2.0, 10.0, 100.0, 1000.0] {
                let s = analytic_solve(pe, 0.25, 1.0, 30, m_c, 30, scheme).unwrap();
                let want = peak_error(scheme, pe, 1.0).unwrap();
                prop_assert!((s.eq34_error() - want).abs() <= 1e-9 * want.abs());
            }
        }

        #[test]
        fn stabilization_dominates(pe in 100.0f64..1e6) {
            let ratio = peak_error(Scheme::ElementAveraged, pe, 1.0).unwrap()
                / peak_error(Scheme::Galerkin, pe, 1.0).unwrap();
            prop_assert!(ratio.abs() <= 3.0 / pe * 1.01 + 1e-12);
        }
    }
}
