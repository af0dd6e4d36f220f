//! Domain types shared by the solvers and the analyzer.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mathf;

/// Permeability of free space (H/m).
pub const MU_0: f64 = 4.0e-7 * PI;

/// Conductor properties and velocity along +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    sigma: f64,
    mu: f64,
    u_z: f64,
}

impl Material {
    pub fn new(sigma: f64, mu: f64, u_z: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("conductivity must be positive"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("permeability must be positive"));
        }
        if !(u_z >= 0.0 && u_z.is_finite()) {
            return Err(Error::invalid("velocity must be non-negative"));
        }
        Ok(Material { sigma, mu, u_z })
    }

    /// Material whose velocity yields the requested Peclet number on `dz`.
    pub fn for_peclet(pe: f64, dz: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(dz > 0.0) {
            return Err(Error::invalid("element length must be positive"));
        }
        if !(pe >= 0.0 && pe.is_finite()) {
            return Err(Error::invalid("Peclet number must be non-negative"));
        }
        Material::new(sigma, mu, 2.0 * pe / (mu * sigma * dz))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn u_z(&self) -> f64 {
        self.u_z
    }

    /// `mu * sigma * u_z`, the inverse length scale of the convective term.
    pub fn convection(&self) -> f64 {
        self.mu * self.sigma * self.u_z
    }
}

/// Element Peclet number. Only obtainable through [`peclet_of`], so it is
/// always consistent with the material and element length it came from.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Peclet(f64);

impl Peclet {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn peclet_of(material: &Material, dz: f64) -> Result<Peclet> {
    if !(dz > 0.0 && dz.is_finite()) {
        return Err(Error::invalid("element length must be positive"));
    }
    Ok(Peclet(
        material.mu * material.sigma * mathf::abs(material.u_z) * dz / 2.0,
    ))
}

/// Uniform 1D grid on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    length: f64,
    dz: f64,
    node_count: usize,
}

impl Mesh1D {
    pub fn new(node_count: usize, dz: f64) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::invalid("a 1D mesh needs at least 3 nodes"));
        }
        if !(dz > 0.0 && dz.is_finite()) {
            return Err(Error::invalid("element length must be positive"));
        }
        Ok(Mesh1D {
            length: (node_count - 1) as f64 * dz,
            dz,
            node_count,
        })
    }

    /// Mesh of length `length`; `length / dz` must be an integer to 1e-12.
    pub fn from_length(length: f64, dz: f64) -> Result<Self> {
        if !(dz > 0.0 && length > 0.0) {
            return Err(Error::invalid("length and element length must be positive"));
        }
        let elements = mathf::round(length / dz);
        if mathf::abs(elements * dz - length) > 1e-12 * length {
            return Err(Error::invalid(
                "length is not an integer multiple of the element length",
            ));
        }
        Mesh1D::new(elements as usize + 1, dz)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn element_count(&self) -> usize {
        self.node_count - 1
    }

    pub fn node_z(&self, n: usize) -> f64 {
        n as f64 * self.dz
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.node_count).map(move |n| self.node_z(n))
    }
}

/// Structured grid: uniform along z (the flow direction), graded along y.
///
/// Node `(n, m)` sits at `z0 + n*dz`, `y0 + sum(row_heights[..m])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    nz: usize,
    ny: usize,
    dz: f64,
    row_heights: Vec<f64>,
    z0: f64,
    y0: f64,
    y_nodes: Vec<f64>,
}

impl Mesh2D {
    pub fn new(nz: usize, dz: f64, row_heights: Vec<f64>, z0: f64, y0: f64) -> Result<Self> {
        let ny = row_heights.len() + 1;
        if nz < 3 || ny < 3 {
            return Err(Error::invalid("a 2D mesh needs at least 3x3 nodes"));
        }
        if !(dz > 0.0 && dz.is_finite()) {
            return Err(Error::invalid("z spacing must be positive"));
        }
        if row_heights.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::invalid("degenerate element: row height must be positive"));
        }
        let mut y_nodes = Vec::with_capacity(ny);
        let mut y = y0;
        y_nodes.push(y);
        for h in &row_heights {
            y += h;
            y_nodes.push(y);
        }
        Ok(Mesh2D {
            nz,
            ny,
            dz,
            row_heights,
            z0,
            y0,
            y_nodes,
        })
    }

    /// Conducting sheet of thickness `d` centred on y = 0, with `air` of
    /// padding above and below. Conductor rows are uniform; air rows grow
    /// geometrically by `grading` away from the sheet.
    #[allow(clippy::too_many_arguments)]
    pub fn sheet(
        nz: usize,
        dz: f64,
        z0: f64,
        d: f64,
        conductor_rows: usize,
        air: f64,
        air_rows: usize,
        grading: f64,
    ) -> Result<Self> {
        if conductor_rows == 0 || conductor_rows % 2 != 0 {
            return Err(Error::invalid(
                "conductor rows must be even so a node row lies on y = 0",
            ));
        }
        if !(grading > 0.0) || !(d > 0.0) || !(air >= 0.0) {
            return Err(Error::invalid("sheet dimensions must be positive"));
        }
        let air_heights = geometric_rows(air, air_rows, grading);
        let mut heights = Vec::with_capacity(2 * air_rows + conductor_rows);
        heights.extend(air_heights.iter().rev().copied());
        heights.extend(core::iter::repeat(d / conductor_rows as f64).take(conductor_rows));
        heights.extend(air_heights.iter().copied());
        Mesh2D::new(nz, dz, heights, z0, -(d / 2.0 + air))
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn row_heights(&self) -> &[f64] {
        &self.row_heights
    }

    pub fn node_count(&self) -> usize {
        self.nz * self.ny
    }

    pub fn element_count(&self) -> usize {
        (self.nz - 1) * (self.ny - 1)
    }

    /// Node index, z-major so neighbouring columns are `ny` apart.
    pub fn node(&self, n: usize, m: usize) -> usize {
        n * self.ny + m
    }

    pub fn element(&self, i: usize, j: usize) -> usize {
        i * (self.ny - 1) + j
    }

    pub fn z(&self, n: usize) -> f64 {
        self.z0 + n as f64 * self.dz
    }

    pub fn y(&self, m: usize) -> f64 {
        self.y_nodes[m]
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    pub fn element_centroid(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.z(i) + 0.5 * self.dz,
            0.5 * (self.y_nodes[j] + self.y_nodes[j + 1]),
        )
    }
}

fn geometric_rows(total: f64, rows: usize, ratio: f64) -> Vec<f64> {
    if rows == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = (0..rows).map(|k| mathf::powi(ratio, k as i64)).collect();
    let sum: f64 = weights.iter().sum();
    weights.iter().map(|w| total * w / sum).collect()
}

/// Applied flux density `B_x` as a pure function of position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldProfile {
    /// `B` on `a <= z <= b`, zero elsewhere.
    RectPulse1D { a: f64, b: f64, amplitude: f64 },
    /// `B` on `|z| <= a` and `|y| <= b`.
    RectPulse2D { a: f64, b: f64, amplitude: f64 },
    /// `B` inside radius `R`, Gaussian fall-off `B exp(-((r-R)/(R/2))^2)` outside.
    SmoothCircle2D { radius: f64, amplitude: f64 },
}

/// Relative slack on pulse edges so that nodes placed at `n * dz` are not
/// dropped by rounding.
const EDGE_SLACK: f64 = 1e-10;

impl FieldProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FieldProfile::RectPulse1D { a, b, amplitude } => b > a && amplitude.is_finite(),
            FieldProfile::RectPulse2D { a, b, amplitude } => a > 0.0 && b > 0.0 && amplitude.is_finite(),
            FieldProfile::SmoothCircle2D { radius, amplitude } => radius > 0.0 && amplitude.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("field profile extents must be positive"))
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            FieldProfile::RectPulse1D { amplitude, .. }
            | FieldProfile::RectPulse2D { amplitude, .. }
            | FieldProfile::SmoothCircle2D { amplitude, .. } => amplitude,
        }
    }

    /// Axial (z) extent of the region where the field is applied. For the
    /// smooth circle this is taken out to `r = 2R`, where the tail has
    /// fallen to `exp(-4)` of the plateau.
    pub fn axial_width(&self) -> f64 {
        match *self {
            FieldProfile::RectPulse1D { a, b, .. } => b - a,
            FieldProfile::RectPulse2D { a, .. } => 2.0 * a,
            FieldProfile::SmoothCircle2D { radius, .. } => 4.0 * radius,
        }
    }

    pub fn sample(&self, z: f64, y: f64) -> f64 {
        match *self {
            FieldProfile::RectPulse1D { a, b, amplitude } => {
                let slack = EDGE_SLACK * mathf::abs(a).max(mathf::abs(b)).max(1.0);
                if z >= a - slack && z <= b + slack {
                    amplitude
                } else {
                    0.0
                }
            }
            FieldProfile::RectPulse2D { a, b, amplitude } => {
                let sz = EDGE_SLACK * a.max(1.0);
                let sy = EDGE_SLACK * b.max(1.0);
                if mathf::abs(z) <= a + sz && mathf::abs(y) <= b + sy {
                    amplitude
                } else {
                    0.0
                }
            }
            FieldProfile::SmoothCircle2D { radius, amplitude } => {
                let r = mathf::hypot(y, z);
                if r <= radius {
                    amplitude
                } else {
                    let s = (r - radius) / (0.5 * radius);
                    amplitude * mathf::exp(-s * s)
                }
            }
        }
    }
}

/// Free-function form of [`FieldProfile::sample`]; `point = (z, y)`.
pub fn sample_profile(profile: &FieldProfile, point: (f64, f64)) -> f64 {
    profile.sample(point.0, point.1)
}

/// Treatment of the applied field in the load vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Standard Galerkin: the applied field is interpolated with the shape
    /// functions (consistent load).
    Galerkin,
    /// The applied field is replaced by its per-element nodal mean before
    /// the element load is integrated.
    ElementAveraged,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Galerkin, Scheme::ElementAveraged];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Galerkin => "galerkin",
            Scheme::ElementAveraged => "averaged",
        }
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn peclet_from_figure_parameters() {
        // mu*sigma*u = 20000 per metre on dz = 0.2
        let m = Material::new(20000.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(peclet_of(&m, 0.2).unwrap().value(), 2000.0, max_relative = 1e-15);
        let m = Material::new(16.0, 1.0, 1.0).unwrap();
        assert_eq!(peclet_of(&m, 0.25).unwrap().value(), 2.0);
        let still = Material::new(5.0, 3.0, 0.0).unwrap();
        assert_eq!(peclet_of(&still, 0.7).unwrap().value(), 0.0);
    }

    #[test]
    fn peclet_rejects_bad_length() {
        let m = Material::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(peclet_of(&m, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(peclet_of(&m, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn material_invariants() {
        assert!(Material::new(0.0, 1.0, 1.0).is_err());
        assert!(Material::new(1.0, -1.0, 1.0).is_err());
        assert!(Material::new(1.0, 1.0, -1.0).is_err());
        let m = Material::for_peclet(60.0, 0.1, 7.21e6, MU_0).unwrap();
        assert_relative_eq!(peclet_of(&m, 0.1).unwrap().value(), 60.0, max_relative = 1e-14);
    }

    #[test]
    fn profile_examples() {
        let p = FieldProfile::RectPulse1D {
            a: 1.0,
            b: 2.0,
            amplitude: 1.0,
        };
        assert_eq!(p.sample(1.5, 0.0), 1.0);
        assert_eq!(p.sample(2.5, 0.0), 0.0);
        let c = FieldProfile::SmoothCircle2D {
            radius: 1.0,
            amplitude: 1.0,
        };
        assert_eq!(sample_profile(&c, (1.0, 0.0)), 1.0);
        assert_relative_eq!(c.sample(1.5, 0.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(c.sample(0.9, 1.2), (-1.0f64).exp(), max_relative = 1e-14);
        let r = FieldProfile::RectPulse2D {
            a: 1.0,
            b: 0.5,
            amplitude: 2.0,
        };
        assert_eq!(r.sample(-1.0, 0.5), 2.0);
        assert_eq!(r.sample(0.0, 0.6), 0.0);
    }

    #[test]
    fn pulse_edges_survive_rounding() {
        let p = FieldProfile::RectPulse1D {
            a: 4.0,
            b: 6.0,
            amplitude: 1.0,
        };
        let mesh = Mesh1D::from_length(10.0, 0.1).unwrap();
        let inside = mesh.nodes().filter(|&z| p.sample(z, 0.0) != 0.0).count();
        assert_eq!(inside, 21);
    }

    #[test]
    fn mesh1d_checks() {
        assert!(Mesh1D::new(2, 0.1).is_err());
        assert!(Mesh1D::from_length(10.0, 0.3).is_err());
        let m = Mesh1D::from_length(10.0, 0.25).unwrap();
        assert_eq!(m.node_count(), 41);
        assert!(((m.node_count() - 1) as f64 * m.dz() - m.length()).abs() <= 1e-12 * m.length());
    }

    #[test]
    fn sheet_mesh_has_centre_row() {
        let m = Mesh2D::sheet(11, 0.1, 0.0, 1.3, 6, 6.5, 8, 1.3).unwrap();
        assert_eq!(m.ny(), 6 + 16 + 1);
        assert!(m.y_nodes().iter().any(|y| y.abs() < 1e-12));
        assert_relative_eq!(m.y(0), -(0.65 + 6.5));
        assert_relative_eq!(m.y(m.ny() - 1), 0.65 + 6.5, max_relative = 1e-14);
        assert!(Mesh2D::sheet(11, 0.1, 0.0, 1.3, 5, 6.5, 8, 1.3).is_err());
        assert!(Mesh2D::new(5, 0.1, alloc::vec![0.1, 0.0], 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn peclet_is_linear(sigma in 0.1f64..1e7, mu in 1e-7f64..10.0, u in 0.0f64..1e3,
                            dz in 1e-3f64..1.0, k in 0.1f64..10.0) {
            let base = peclet_of(&Material::new(sigma, mu, u).unwrap(), dz).unwrap().value();
            let scaled = [
                peclet_of(&Material::new(k * sigma, mu, u).unwrap(), dz).unwrap().value(),
                peclet_of(&Material::new(sigma, k * mu, u).unwrap(), dz).unwrap().value(),
                peclet_of(&Material::new(sigma, mu, k * u).unwrap(), dz).unwrap().value(),
                peclet_of(&Material::new(sigma, mu, u).unwrap(), k * dz).unwrap().value(),
            ];
            for s in scaled {
                prop_assert!((s - k * base).abs() <= 1e-12 * (k * base).abs().max(1e-300));
            }
        }

        #[test]
        fn profiles_are_bounded(z in -5.0f64..5.0, y in -5.0f64..5.0, amp in 0.0f64..3.0) {
            let profiles = [
                FieldProfile::RectPulse1D { a: -1.0, b: 2.0, amplitude: amp },
                FieldProfile::RectPulse2D { a: 1.0, b: 0.5, amplitude: amp },
                FieldProfile::SmoothCircle2D { radius: 0.8, amplitude: amp },
            ];
            for p in profiles {
                let v = p.sample(z, y);
                prop_assert!(v >= 0.0 && v <= amp);
            }
        }

        #[test]
        fn smooth_circle_is_continuous(theta in 0.0f64..core::f64::consts::TAU, r in 0.01f64..3.0) {
            let p = FieldProfile::SmoothCircle2D { radius: 1.0, amplitude: 1.0 };
            let h = 1e-7;
            let a = p.sample(r * theta.cos(), r * theta.sin());
            let b = p.sample((r + h) * theta.cos(), (r + h) * theta.sin());
            // |dB/dr| <= 4/R * max(s e^{-s^2}) < 2
            prop_assert!((a - b).abs() <= 2.0 * h * 1.01);
        }
    }
}
