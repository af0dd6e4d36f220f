//! Coupled `(phi, A_y, A_z)` solver on a structured quadrilateral grid.
//!
//! Unknowns are interleaved per node: `3 k + f` with `f` one of
//! [`PHI`], [`AY`], [`AZ`] and `k = n ny + m`. The `A_y`/`A_z` rows are
//! multiplied by `mu` and the phi rows divided by `sigma`, so the interior
//! rows of a uniform all-conductor grid are the Z-domain stencils directly.

mod element;
pub mod stencil;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use element::{element_matrix, ElementCoeffs, ElementMatrix, AY, AZ, LOCAL, PHI};

use crate::banded::{BandedMatrix, SolveStats};
use crate::error::{Error, Result};
use crate::mathf::abs;
use crate::model::{peclet_of, FieldProfile, Material, Mesh2D, Scheme};

pub const RESIDUAL_BOUND_2D: f64 = 1e-8;

/// Weight of the air Laplace terms in the phi rows of nodes that also touch
/// the conductor, so they barely perturb the insulating interface condition.
/// Nodes surrounded by air get weight one.
pub const AIR_PHI_INTERFACE_WEIGHT: f64 = 1e-6;

/// Conductivity multiplier per element (1 conductor, 0 air).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap2D {
    cols: usize,
    rows: usize,
    multiplier: Vec<f64>,
}

impl RegionMap2D {
    pub fn uniform(mesh: &Mesh2D, multiplier: f64) -> Self {
        RegionMap2D {
            cols: mesh.nz() - 1,
            rows: mesh.ny() - 1,
            multiplier: vec![multiplier; mesh.element_count()],
        }
    }

    /// Element rows whose centroid lies within `|y| < d/2` conduct. Their
    /// heights must add up to `d` (the band is aligned with the mesh).
    pub fn sheet(mesh: &Mesh2D, d: f64) -> Result<Self> {
        let rows = mesh.ny() - 1;
        let flags: Vec<bool> = (0..rows)
            .map(|j| abs(mesh.element_centroid(0, j).1) < 0.5 * d)
            .collect();
        let thickness: f64 = (0..rows)
            .filter(|&j| flags[j])
            .map(|j| mesh.row_heights()[j])
            .sum();
        if abs(thickness - d) > 1e-9 * d {
            return Err(Error::invalid(format!(
                "conducting rows span {thickness} but the sheet is {d} thick"
            )));
        }
        let first = flags.iter().position(|&f| f);
        let last = flags.iter().rposition(|&f| f);
        if let (Some(a), Some(b)) = (first, last) {
            if flags[a..=b].iter().any(|f| !f) {
                return Err(Error::invalid("conducting rows must be contiguous"));
            }
        }
        Ok(Self::from_rows(mesh, &flags))
    }

    pub fn from_rows(mesh: &Mesh2D, conducting: &[bool]) -> Self {
        let rows = mesh.ny() - 1;
        let cols = mesh.nz() - 1;
        let mut multiplier = vec![0.0; cols * rows];
        for i in 0..cols {
            for j in 0..rows {
                multiplier[i * rows + j] = if conducting[j] { 1.0 } else { 0.0 };
            }
        }
        RegionMap2D {
            cols,
            rows,
            multiplier,
        }
    }

    pub fn multiplier(&self, i: usize, j: usize) -> f64 {
        self.multiplier[i * self.rows + j]
    }

    pub fn is_conducting(&self, i: usize, j: usize) -> bool {
        self.multiplier(i, j) != 0.0
    }

    pub fn conducting_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows).filter(move |&j| self.is_conducting(0, j))
    }

    fn matches(&self, mesh: &Mesh2D) -> bool {
        self.cols == mesh.nz() - 1 && self.rows == mesh.ny() - 1
    }
}

/// Assembled system with boundary conditions applied.
#[derive(Debug, Clone)]
pub struct DiscreteSystem2D {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
    pub mesh: Mesh2D,
    pub scheme: Scheme,
    pub pe: f64,
    /// Node whose phi is pinned to zero.
    pub pinned: usize,
}

impl DiscreteSystem2D {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution2D {
    pub phi: Vec<f64>,
    pub a_y: Vec<f64>,
    pub a_z: Vec<f64>,
    /// Reaction flux density per element, indexed as [`Mesh2D::element`].
    pub b_x: Vec<f64>,
    pub stats: SolveStats,
}

/// Applied field at every node.
pub fn sample_nodes(mesh: &Mesh2D, profile: &FieldProfile) -> Vec<f64> {
    let mut b = vec![0.0; mesh.node_count()];
    for n in 0..mesh.nz() {
        for m in 0..mesh.ny() {
            b[mesh.node(n, m)] = profile.sample(mesh.z(n), mesh.y(m));
        }
    }
    b
}

pub fn assemble_2d(
    mesh: &Mesh2D,
    material: &Material,
    regions: &RegionMap2D,
    profile: &FieldProfile,
    scheme: Scheme,
) -> Result<DiscreteSystem2D> {
    profile.validate()?;
    assemble_2d_nodal(mesh, material, regions, &sample_nodes(mesh, profile), scheme)
}

/// Assembly from nodal samples of the applied field. The element-averaged
/// scheme uses the mean of the four corner samples on each element.
pub fn assemble_2d_nodal(
    mesh: &Mesh2D,
    material: &Material,
    regions: &RegionMap2D,
    b_nodes: &[f64],
    scheme: Scheme,
) -> Result<DiscreteSystem2D> {
    if !regions.matches(mesh) {
        return Err(Error::invalid("region map does not match the mesh"));
    }
    if b_nodes.len() != mesh.node_count() {
        return Err(Error::invalid("one field sample per node is required"));
    }
    let (nz, ny) = (mesh.nz(), mesh.ny());
    let pe = peclet_of(material, mesh.dz())?.value();
    let dofs = 3 * mesh.node_count();
    let band = 3 * (ny + 1) + 2;
    let mut matrix = BandedMatrix::zeros(dofs, band, band);
    let mut rhs = vec![0.0; dofs];

    let mut touches = vec![false; mesh.node_count()];
    for i in 0..nz - 1 {
        for j in 0..ny - 1 {
            if regions.is_conducting(i, j) {
                for &(a, b) in &LOCAL {
                    touches[mesh.node(i + a, j + b)] = true;
                }
            }
        }
    }
    let mu_sigma = material.mu() * material.sigma();

    for i in 0..nz - 1 {
        for j in 0..ny - 1 {
            let nodes: [usize; 4] = core::array::from_fn(|l| mesh.node(i + LOCAL[l].0, j + LOCAL[l].1));
            let s = regions.multiplier(i, j);
            let coeffs = ElementCoeffs {
                hz: mesh.dz(),
                hy: mesh.row_heights()[j],
                mu_sigma: mu_sigma * s,
                u_z: material.u_z(),
                air_phi_weight: core::array::from_fn(|l| {
                    if touches[nodes[l]] {
                        AIR_PHI_INTERFACE_WEIGHT
                    } else {
                        1.0
                    }
                }),
                conducting: s != 0.0,
            };
            let em = element_matrix(&coeffs);
            let b_e = 0.25 * nodes.iter().map(|&k| b_nodes[k]).sum::<f64>();
            for a in 0..4 {
                for f in 0..3 {
                    let r = 3 * nodes[a] + f;
                    let row = 3 * a + f;
                    for b in 0..4 {
                        for g in 0..3 {
                            let v = em.k[row][3 * b + g];
                            if v != 0.0 {
                                matrix.add(r, 3 * nodes[b] + g, v);
                            }
                        }
                    }
                    rhs[r] += match scheme {
                        Scheme::Galerkin => (0..4).map(|b| em.load[row][b] * b_nodes[nodes[b]]).sum::<f64>(),
                        Scheme::ElementAveraged => em.load_avg[row] * b_e,
                    };
                }
            }
        }
    }

    // A_y = A_z = 0 on the inlet and the top and bottom edges.
    for n in 0..nz {
        for m in 0..ny {
            if n == 0 || m == 0 || m == ny - 1 {
                let k = mesh.node(n, m);
                for f in [AY, AZ] {
                    pin(&mut matrix, &mut rhs, 3 * k + f);
                }
            }
        }
    }
    let centre = (0..ny)
        .filter(|&m| touches[mesh.node(0, m)])
        .min_by(|&a, &b| abs(mesh.y(a)).total_cmp(&abs(mesh.y(b))))
        .ok_or_else(|| Error::invalid("the region map has no conducting element"))?;
    let pinned = mesh.node(0, centre);
    pin(&mut matrix, &mut rhs, 3 * pinned + PHI);

    Ok(DiscreteSystem2D {
        matrix,
        rhs,
        mesh: mesh.clone(),
        scheme,
        pe,
        pinned,
    })
}

/// Replaces row `r` by `d x_r = 0`, keeping the assembled diagonal as scale.
fn pin(matrix: &mut BandedMatrix, rhs: &mut [f64], r: usize) {
    let d = matrix.get(r, r);
    let d = if d != 0.0 { abs(d) } else { 1.0 };
    matrix.clear_row(r);
    matrix.set(r, r, d);
    rhs[r] = 0.0;
}

pub fn solve_2d(system: &DiscreteSystem2D) -> Result<Solution2D> {
    let (x, stats) = system.matrix.solve(&system.rhs, RESIDUAL_BOUND_2D)?;
    let nodes = system.mesh.node_count();
    let field = |f: usize| (0..nodes).map(|k| x[3 * k + f]).collect::<Vec<f64>>();
    let (phi, a_y, a_z) = (field(PHI), field(AY), field(AZ));
    let b_x = reaction_field_2d(&system.mesh, &a_y, &a_z);
    Ok(Solution2D {
        phi,
        a_y,
        a_z,
        b_x,
        stats,
    })
}

/// `dA_z/dy - dA_y/dz` at element centroids from bilinear gradients.
pub fn reaction_field_2d(mesh: &Mesh2D, a_y: &[f64], a_z: &[f64]) -> Vec<f64> {
    let (nz, ny) = (mesh.nz(), mesh.ny());
    let mut b = vec![0.0; mesh.element_count()];
    for i in 0..nz - 1 {
        for j in 0..ny - 1 {
            let k = |a: usize, c: usize| mesh.node(i + a, j + c);
            let hy = mesh.row_heights()[j];
            let day_dz = (a_y[k(1, 0)] + a_y[k(1, 1)] - a_y[k(0, 0)] - a_y[k(0, 1)]) / (2.0 * mesh.dz());
            let daz_dy = (a_z[k(0, 1)] + a_z[k(1, 1)] - a_z[k(0, 0)] - a_z[k(1, 0)]) / (2.0 * hy);
            b[mesh.element(i, j)] = daz_dy - day_dz;
        }
    }
    b
}

/// Centreline trace `(z, b_x)`: the mean of the two element rows that share
/// the node row at `y = 0`.
pub fn axis_profile(solution: &Solution2D, mesh: &Mesh2D) -> Result<Vec<(f64, f64)>> {
    let ny = mesh.ny();
    let scale = mesh.y(ny - 1) - mesh.y(0);
    let m0 = (1..ny - 1)
        .find(|&m| abs(mesh.y(m)) <= 1e-9 * scale)
        .ok_or_else(|| Error::invalid("mesh has no interior node row at y = 0"))?;
    if solution.b_x.len() != mesh.element_count() {
        return Err(Error::invalid("solution does not belong to this mesh"));
    }
    Ok((0..mesh.nz() - 1)
        .map(|i| {
            let z = mesh.element_centroid(i, m0).0;
            let b = 0.5 * (solution.b_x[mesh.element(i, m0 - 1)] + solution.b_x[mesh.element(i, m0)]);
            (z, b)
        })
        .collect())
}

/// `max |b[n] - (b[n-1] + b[n+1])/2| / amplitude` over interior samples.
pub fn oscillation_metric(trace: &[(f64, f64)], amplitude: f64) -> Result<f64> {
    if trace.len() < 3 {
        return Err(Error::invalid("trace needs at least three samples"));
    }
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::invalid("amplitude must be finite and nonzero"));
    }
    Ok(trace
        .windows(3)
        .map(|w| abs(w[1].1 - 0.5 * (w[0].1 + w[2].1)))
        .fold(0.0, f64::max)
        / abs(amplitude))
}

/// Mesh with every z interval split into `factor` pieces; rows unchanged.
pub fn refine_z(mesh: &Mesh2D, factor: usize) -> Result<Mesh2D> {
    if factor == 0 {
        return Err(Error::invalid("refinement factor must be positive"));
    }
    Mesh2D::new(
        (mesh.nz() - 1) * factor + 1,
        mesh.dz() / factor as f64,
        mesh.row_heights().to_vec(),
        mesh.z(0),
        mesh.y(0),
    )
}

/// Smallest z refinement bringing the Peclet number to 1/2 or below.
pub fn reference_factor(pe: f64) -> usize {
    crate::mathf::ceil(2.0 * pe).max(1.0) as usize
}

/// Galerkin solution on a z-refined mesh with the same material, regions and
/// applied field, returned as a centreline trace restricted to the coarse
/// element centroids.
pub fn refined_reference_2d(
    mesh: &Mesh2D,
    material: &Material,
    regions: &RegionMap2D,
    profile: &FieldProfile,
    factor: usize,
) -> Result<Vec<(f64, f64)>> {
    let fine = refine_z(mesh, factor)?;
    let rows: Vec<bool> = (0..mesh.ny() - 1).map(|j| regions.is_conducting(0, j)).collect();
    let fine_regions = RegionMap2D::from_rows(&fine, &rows);
    let sys = assemble_2d(&fine, material, &fine_regions, profile, Scheme::Galerkin)?;
    let sol = solve_2d(&sys)?;
    let trace = axis_profile(&sol, &fine)?;
    Ok(restrict_trace(&trace, factor))
}

/// Fine-trace values at the coarse element centroids (the mean of the two
/// straddling fine centroids when `factor` is even).
pub fn restrict_trace(fine: &[(f64, f64)], factor: usize) -> Vec<(f64, f64)> {
    let coarse = fine.len() / factor;
    (0..coarse)
        .map(|i| {
            let base = i * factor;
            if factor % 2 == 1 {
                fine[base + factor / 2]
            } else {
                let (a, b) = (fine[base + factor / 2 - 1], fine[base + factor / 2]);
                (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
            }
        })
        .collect()
}

/// `max |b - b_ref| / |amplitude|` over matching centreline samples.
pub fn centreline_overshoot(trace: &[(f64, f64)], reference: &[(f64, f64)], amplitude: f64) -> Result<f64> {
    if trace.len() != reference.len() || trace.is_empty() {
        return Err(Error::invalid(
            "trace and reference must have the same non-zero length",
        ));
    }
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::invalid("amplitude must be finite and nonzero"));
    }
    Ok(trace
        .iter()
        .zip(reference)
        .map(|(a, b)| abs(a.1 - b.1))
        .fold(0.0, f64::max)
        / abs(amplitude))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MU_0;

    fn small_case(scheme: Scheme, amplitude: f64) -> (Mesh2D, Solution2D) {
        let mesh = Mesh2D::sheet(41, 0.1, -2.0, 1.0, 8, 2.0, 4, 1.5).unwrap();
        let regions = RegionMap2D::sheet(&mesh, 1.0).unwrap();
        let material = Material::for_peclet(5.0, mesh.dz(), 1e6, MU_0).unwrap();
        let profile = FieldProfile::SmoothCircle2D {
            radius: 0.4,
            amplitude,
        };
        let sys = assemble_2d(&mesh, &material, &regions, &profile, scheme).unwrap();
        let sol = solve_2d(&sys).unwrap();
        (mesh, sol)
    }

    #[test]
    fn zero_input_gives_zero_solution() {
        for scheme in Scheme::ALL {
            let (mesh, sol) = small_case(scheme, 0.0);
            assert!(sol.a_y.iter().chain(&sol.a_z).chain(&sol.phi).all(|v| *v == 0.0));
            let trace = axis_profile(&sol, &mesh).unwrap();
            assert!(trace.iter().all(|(_, b)| *b == 0.0));
        }
    }

    #[test]
    fn solution_is_even_in_y() {
        let (mesh, sol) = small_case(Scheme::ElementAveraged, 1.0);
        let rows = mesh.ny() - 1;
        let max = sol.b_x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..mesh.nz() - 1 {
            for j in 0..rows {
                let a = sol.b_x[mesh.element(i, j)];
                let b = sol.b_x[mesh.element(i, rows - 1 - j)];
                assert!((a - b).abs() <= 1e-8 * max, "element ({i},{j}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn solve_meets_residual_bound() {
        let (_, sol) = small_case(Scheme::Galerkin, 1.0);
        assert!(sol.stats.relative_residual <= RESIDUAL_BOUND_2D);
        assert!(sol.b_x.iter().any(|b| b.abs() > 1e-3));
    }

    #[test]
    fn oscillation_metric_examples() {
        let linear: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        assert!(oscillation_metric(&linear, 1.0).unwrap() < 1e-12);
        let eps = 0.01;
        let alt: Vec<(f64, f64)> = (0..10)
            .map(|k| (k as f64, if k % 2 == 0 { eps } else { -eps }))
            .collect();
        assert!((oscillation_metric(&alt, 1.0).unwrap() - 2.0 * eps).abs() < 1e-15);
        assert!(oscillation_metric(&alt, 0.0).is_err());
        assert!(oscillation_metric(&alt[..2], 1.0).is_err());
    }

    #[test]
    fn restriction_picks_coarse_centroids() {
        let fine: Vec<(f64, f64)> = (0..8).map(|k| (k as f64 + 0.5, k as f64)).collect();
        let r2 = restrict_trace(&fine, 2);
        assert_eq!(r2.len(), 4);
        assert_eq!(r2[1], (3.0, 2.5));
        let r3 = restrict_trace(&fine[..6], 3);
        assert_eq!(r3, vec![(1.5, 1.0), (4.5, 4.0)]);
    }

    #[test]
    fn refinement_keeps_geometry() {
        let mesh = Mesh2D::sheet(6, 0.2, -1.0, 1.0, 4, 1.0, 2, 1.2).unwrap();
        let fine = refine_z(&mesh, 4).unwrap();
        assert_eq!(fine.nz(), 21);
        assert!((fine.z(20) - mesh.z(5)).abs() < 1e-12);
        assert_eq!(fine.y_nodes(), mesh.y_nodes());
        assert_eq!(reference_factor(2.0), 4);
        assert_eq!(reference_factor(0.3), 1);
    }

    #[test]
    fn overshoot_against_reference() {
        let a = [(0.0, -1.0), (1.0, -0.5)];
        let b = [(0.0, -0.98), (1.0, -0.5)];
        assert!((centreline_overshoot(&a, &b, 2.0).unwrap() - 0.01).abs() < 1e-12);
        assert!(centreline_overshoot(&a, &b[..1], 1.0).is_err());
    }

    #[test]
    fn region_map_validation() {
        let mesh = Mesh2D::sheet(5, 0.1, 0.0, 1.0, 4, 1.0, 2, 1.2).unwrap();
        let r = RegionMap2D::sheet(&mesh, 1.0).unwrap();
        assert_eq!(r.conducting_rows().count(), 4);
        assert!(RegionMap2D::sheet(&mesh, 0.8).is_err());
    }

    #[test]
    fn no_centre_row_is_rejected() {
        let mesh = Mesh2D::new(4, 0.1, vec![0.1, 0.1, 0.1], 0.0, -0.15).unwrap();
        let sol = Solution2D {
            phi: vec![],
            a_y: vec![],
            a_z: vec![],
            b_x: vec![0.0; mesh.element_count()],
            stats: SolveStats {
                residual: 0.0,
                relative_residual: 0.0,
                condition_estimate: 1.0,
            },
        };
        assert!(axis_profile(&sol, &mesh).is_err());
    }
}
