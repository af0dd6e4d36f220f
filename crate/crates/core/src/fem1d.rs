//! 1D induction equation `-A'' + mu sigma u A' = mu sigma u B` on linear
//! elements.
//!
//! Every row is scaled by `dz`, so the interior stencil is the integer-like
//! `(-1-Pe, 2, -1+Pe)` and loads carry a factor `Pe dz`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::banded::{BandedMatrix, SolveStats};
use crate::error::{Error, Result};
use crate::mathf;
use crate::model::{peclet_of, FieldProfile, Material, Mesh1D, Scheme};

/// Relative residual bound enforced by [`solve_1d`].
pub const RESIDUAL_BOUND_1D: f64 = 1e-10;

/// Tridiagonal system; `sub[i]` couples row `i` to `i-1`, `sup[i]` to `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem1D {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
    pub dz: f64,
    pub pe: f64,
    pub scheme: Scheme,
}

impl DiscreteSystem1D {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `(sub, diag, sup)` of row `i`.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        (self.sub[i], self.diag[i], self.sup[i])
    }

    fn to_banded(&self) -> BandedMatrix {
        let n = self.len();
        let mut a = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            if i > 0 {
                a.set(i, i - 1, self.sub[i]);
            }
            a.set(i, i, self.diag[i]);
            if i + 1 < n {
                a.set(i, i + 1, self.sup[i]);
            }
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    /// Nodal vector potential.
    pub a_y: Vec<f64>,
    /// Element reaction flux density, `-(a_y[e+1] - a_y[e]) / dz`.
    pub b_x: Vec<f64>,
    pub dz: f64,
    pub stats: SolveStats,
}

/// Assembles the system for `profile` sampled at the mesh nodes.
pub fn assemble_1d(
    mesh: &Mesh1D,
    material: &Material,
    profile: &FieldProfile,
    scheme: Scheme,
) -> Result<DiscreteSystem1D> {
    profile.validate()?;
    let nodal: Vec<f64> = mesh.nodes().map(|z| profile.sample(z, 0.0)).collect();
    assemble_1d_nodal(mesh, material, &nodal, scheme)
}

/// Assembles the system for explicit nodal values of the applied field.
pub fn assemble_1d_nodal(
    mesh: &Mesh1D,
    material: &Material,
    b_nodal: &[f64],
    scheme: Scheme,
) -> Result<DiscreteSystem1D> {
    let n = mesh.node_count();
    if b_nodal.len() != n {
        return Err(Error::invalid(format!(
            "{} applied-field values for {} nodes",
            b_nodal.len(),
            n
        )));
    }
    if b_nodal.iter().any(|b| !b.is_finite()) {
        return Err(Error::invalid("applied field must be finite"));
    }
    let dz = mesh.dz();
    let pe = peclet_of(material, dz)?.value();
    let mut sys = DiscreteSystem1D {
        sub: vec![0.0; n],
        diag: vec![0.0; n],
        sup: vec![0.0; n],
        rhs: vec![0.0; n],
        dz,
        pe,
        scheme,
    };
    // Element matrix (x dz): diffusion [[1,-1],[-1,1]] plus convection
    // Pe [[-1,1],[-1,1]].
    let k = [[1.0 - pe, -1.0 + pe], [-1.0 - pe, 1.0 + pe]];
    for e in 0..n - 1 {
        let (b0, b1) = (b_nodal[e], b_nodal[e + 1]);
        let load = match scheme {
            Scheme::Galerkin => {
                let c = pe * dz / 3.0;
                [c * (2.0 * b0 + b1), c * (b0 + 2.0 * b1)]
            }
            Scheme::ElementAveraged => {
                let be = 0.5 * (b0 + b1);
                [pe * dz * be, pe * dz * be]
            }
        };
        sys.diag[e] += k[0][0];
        sys.sup[e] += k[0][1];
        sys.sub[e + 1] += k[1][0];
        sys.diag[e + 1] += k[1][1];
        sys.rhs[e] += load[0];
        sys.rhs[e + 1] += load[1];
    }
    // A_y(0) = 0 by row replacement; dA_y/dz = 0 at z = L is natural.
    sys.sub[0] = 0.0;
    sys.diag[0] = 1.0;
    sys.sup[0] = 0.0;
    sys.rhs[0] = 0.0;
    Ok(sys)
}

pub fn solve_1d(system: &DiscreteSystem1D) -> Result<Solution1D> {
    if system.len() < 3 {
        return Err(Error::invalid("system too small"));
    }
    let (a_y, stats) = system.to_banded().solve(&system.rhs, RESIDUAL_BOUND_1D)?;
    let b_x = differentiate(&a_y, system.dz);
    Ok(Solution1D {
        a_y,
        b_x,
        dz: system.dz,
        stats,
    })
}

/// Element-wise `-(a[e+1] - a[e]) / dz`.
pub fn differentiate(a_y: &[f64], dz: f64) -> Vec<f64> {
    a_y.windows(2).map(|w| -(w[1] - w[0]) / dz).collect()
}

pub fn reaction_field(solution: &Solution1D, mesh: &Mesh1D) -> Result<Vec<f64>> {
    if solution.a_y.len() != mesh.node_count() {
        return Err(Error::invalid("solution does not match mesh"));
    }
    Ok(differentiate(&solution.a_y, mesh.dz()))
}

/// `max_e |b_x[e] - b_ref[e]| / amplitude`.
pub fn peak_spurious_error(solution: &Solution1D, reference: &Solution1D, amplitude: f64) -> Result<f64> {
    if !(amplitude > 0.0) {
        return Err(Error::invalid("amplitude must be positive"));
    }
    if solution.b_x.len() != reference.b_x.len() {
        return Err(Error::invalid(
            "solution and reference are not on a common node set",
        ));
    }
    Ok(solution
        .b_x
        .iter()
        .zip(&reference.b_x)
        .map(|(a, b)| mathf::abs(a - b))
        .fold(0.0, f64::max)
        / amplitude)
}

/// Signed deviation `(b_x[element] - b_ideal) / amplitude` from the ideal
/// plateau `b_ideal = -amplitude` under a fully developed pulse.
pub fn plateau_deviation(solution: &Solution1D, element: usize, amplitude: f64) -> Result<f64> {
    if !(amplitude > 0.0) {
        return Err(Error::invalid("amplitude must be positive"));
    }
    let b = solution
        .b_x
        .get(element)
        .ok_or_else(|| Error::invalid("element index out of range"))?;
    Ok((b + amplitude) / amplitude)
}

/// Galerkin solution on a mesh refined until the element Peclet number is
/// at most 0.5, restricted back to the nodes of `mesh`.
pub fn refined_reference(mesh: &Mesh1D, material: &Material, profile: &FieldProfile) -> Result<Solution1D> {
    let pe = peclet_of(material, mesh.dz())?.value();
    let factor = (mathf::ceil(pe / 0.5) as usize).max(1);
    let fine_dz = mesh.dz() / factor as f64;
    let fine = Mesh1D::new(mesh.element_count() * factor + 1, fine_dz)?;
    let sol = solve_1d(&assemble_1d(&fine, material, profile, Scheme::Galerkin)?)?;
    let a_y: Vec<f64> = sol.a_y.iter().step_by(factor).copied().collect();
    debug_assert_eq!(a_y.len(), mesh.node_count());
    let b_x = differentiate(&a_y, mesh.dz());
    Ok(Solution1D {
        a_y,
        b_x,
        dz: mesh.dz(),
        stats: sol.stats,
    })
}

/// Number of sign changes between consecutive entries whose magnitudes both
/// exceed `floor`.
pub fn sign_alternations(values: &[f64], floor: f64) -> usize {
    values
        .windows(2)
        .filter(|w| mathf::abs(w[0]) > floor && mathf::abs(w[1]) > floor && (w[0] > 0.0) != (w[1] > 0.0))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn material(pe: f64, dz: f64) -> Material {
        Material::for_peclet(pe, dz, 1.0, 1.0).unwrap()
    }

    #[test]
    fn interior_row_at_pe_two() {
        let mesh = Mesh1D::from_length(2.5, 0.25).unwrap();
        let zero = vec![0.0; mesh.node_count()];
        let sys = assemble_1d_nodal(&mesh, &material(2.0, 0.25), &zero, Scheme::Galerkin).unwrap();
        let (l, d, u) = sys.row(4);
        assert_relative_eq!(l, -3.0, epsilon = 1e-14);
        assert_relative_eq!(d, 2.0, epsilon = 1e-14);
        assert_relative_eq!(u, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn averaged_delta_load() {
        let mesh = Mesh1D::new(5, 0.25).unwrap();
        let b = [0.0, 0.0, 1.0, 0.0, 0.0];
        let sys = assemble_1d_nodal(&mesh, &material(2.0, 0.25), &b, Scheme::ElementAveraged).unwrap();
        assert_relative_eq!(sys.rhs[2], 0.5, epsilon = 1e-14);
        let sys = assemble_1d_nodal(&mesh, &material(2.0, 0.25), &b, Scheme::Galerkin).unwrap();
        assert_relative_eq!(sys.rhs[2], 2.0 * 2.0 * 0.25 * 4.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_field_same_rhs() {
        let mesh = Mesh1D::new(9, 0.1).unwrap();
        let b = vec![0.7; 9];
        let m = material(3.0, 0.1);
        let g = assemble_1d_nodal(&mesh, &m, &b, Scheme::Galerkin).unwrap();
        let p = assemble_1d_nodal(&mesh, &m, &b, Scheme::ElementAveraged).unwrap();
        for i in 1..8 {
            assert_relative_eq!(g.rhs[i], 2.0 * 3.0 * 0.1 * 0.7, max_relative = 1e-14);
            assert_relative_eq!(g.rhs[i], p.rhs[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn boundary_rows() {
        let mesh = Mesh1D::new(6, 0.5).unwrap();
        let sys = assemble_1d_nodal(&mesh, &material(4.0, 0.5), &[1.0; 6], Scheme::Galerkin).unwrap();
        assert_eq!(sys.row(0), (0.0, 1.0, 0.0));
        assert_eq!(sys.rhs[0], 0.0);
        let (l, d, u) = sys.row(5);
        assert_relative_eq!(l, -5.0);
        assert_relative_eq!(d, 5.0);
        assert_eq!(u, 0.0);
    }

    #[test]
    fn mismatched_field_rejected() {
        let mesh = Mesh1D::new(6, 0.5).unwrap();
        let r = assemble_1d_nodal(&mesh, &material(1.0, 0.5), &[1.0; 5], Scheme::Galerkin);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_input_zero_solution() {
        let mesh = Mesh1D::from_length(10.0, 0.2).unwrap();
        let p = FieldProfile::RectPulse1D {
            a: 4.0,
            b: 6.0,
            amplitude: 0.0,
        };
        let sol =
            solve_1d(&assemble_1d(&mesh, &material(2000.0, 0.2), &p, Scheme::Galerkin).unwrap()).unwrap();
        assert!(sol.a_y.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn reaction_of_linear_and_constant() {
        let mesh = Mesh1D::new(5, 0.5).unwrap();
        let stats = SolveStats {
            residual: 0.0,
            relative_residual: 0.0,
            condition_estimate: 1.0,
        };
        let lin = Solution1D {
            a_y: (0..5).map(|i| 3.0 * i as f64 * 0.5).collect(),
            b_x: vec![],
            dz: 0.5,
            stats,
        };
        assert!(reaction_field(&lin, &mesh)
            .unwrap()
            .iter()
            .all(|b| (b + 3.0).abs() < 1e-14));
        let flat = Solution1D {
            a_y: vec![2.0; 5],
            ..lin
        };
        assert!(reaction_field(&flat, &mesh).unwrap().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn error_measures() {
        let mesh = Mesh1D::from_length(10.0, 0.25).unwrap();
        let p = FieldProfile::RectPulse1D {
            a: 4.0,
            b: 6.0,
            amplitude: 1.0,
        };
        let sol = solve_1d(&assemble_1d(&mesh, &material(2.0, 0.25), &p, Scheme::ElementAveraged).unwrap())
            .unwrap();
        assert_eq!(peak_spurious_error(&sol, &sol, 1.0).unwrap(), 0.0);
        assert!(peak_spurious_error(&sol, &sol, 0.0).is_err());
        assert!(plateau_deviation(&sol, 10_000, 1.0).is_err());
    }

    #[test]
    fn alternation_counter() {
        assert_eq!(sign_alternations(&[1.0, -1.0, 1.0, -1.0], 0.5), 3);
        assert_eq!(sign_alternations(&[1.0, -1e-6, 1.0], 1e-3), 0);
        assert_eq!(sign_alternations(&[1.0, 2.0, 3.0], 0.0), 0);
    }

    proptest! {
        #[test]
        fn interior_rows_annihilate_constants(pe in 0.0f64..5000.0, dz in 0.01f64..1.0,
                                              field in proptest::collection::vec(0.0f64..2.0, 8)) {
            let mesh = Mesh1D::new(8, dz).unwrap();
            for scheme in Scheme::ALL {
                let sys = assemble_1d_nodal(&mesh, &material(pe, dz), &field, scheme).unwrap();
                for i in 1..7 {
                    let (l, d, u) = sys.row(i);
                    prop_assert!((l + d + u).abs() <= 1e-12 * (1.0 + pe));
                    prop_assert!((l - (-1.0 - pe)).abs() <= 1e-12 * (1.0 + pe));
                    prop_assert!((u - (-1.0 + pe)).abs() <= 1e-12 * (1.0 + pe));
                }
            }
        }

        #[test]
        fn rhs_weights(pe in 0.0f64..100.0, dz in 0.01f64..1.0,
                       field in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let mesh = Mesh1D::new(6, dz).unwrap();
            let g = assemble_1d_nodal(&mesh, &material(pe, dz), &field, Scheme::Galerkin).unwrap();
            let p = assemble_1d_nodal(&mesh, &material(pe, dz), &field, Scheme::ElementAveraged).unwrap();
            for n in 1..5 {
                let wg = 2.0 * pe * dz * (field[n - 1] + 4.0 * field[n] + field[n + 1]) / 6.0;
                let wp = 2.0 * pe * dz * (field[n - 1] + 2.0 * field[n] + field[n + 1]) / 4.0;
                prop_assert!((g.rhs[n] - wg).abs() <= 1e-12 * (1.0 + wg.abs()));
                prop_assert!((p.rhs[n] - wp).abs() <= 1e-12 * (1.0 + wp.abs()));
            }
        }

        #[test]
        fn solve_respects_residual_bound(pe in 0.01f64..3000.0, amp in 0.0f64..5.0) {
            let mesh = Mesh1D::from_length(10.0, 0.2).unwrap();
            let p = FieldProfile::RectPulse1D { a: 4.0, b: 6.0, amplitude: amp };
            for scheme in Scheme::ALL {
                let sol = solve_1d(&assemble_1d(&mesh, &material(pe, 0.2), &p, scheme).unwrap()).unwrap();
                prop_assert!(sol.stats.relative_residual <= RESIDUAL_BOUND_1D);
                prop_assert_eq!(sol.b_x.len(), mesh.node_count() - 1);
            }
        }
    }
}
