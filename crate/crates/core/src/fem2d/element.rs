//! Bilinear element integrals, generic over the scalar so that the same code
//! produces `f64` systems and exact rational stencils.

use crate::scalar::Scalar;

/// Field index within a node's three unknowns.
pub const PHI: usize = 0;
pub const AY: usize = 1;
pub const AZ: usize = 2;

/// Local node `l = iz + 2 jy`; `iz` along z, `jy` along y.
pub const LOCAL: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// Physical coefficients of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementCoeffs<S> {
    pub hz: S,
    pub hy: S,
    /// `mu * sigma` of the element (zero in air).
    pub mu_sigma: S,
    pub u_z: S,
    /// Weight of the Laplace rows that stand in for the scalar-potential
    /// equation in air, per local node.
    pub air_phi_weight: [S; 4],
    pub conducting: bool,
}

/// `k[3a+f][3b+g]`, nodal load `load[3a+f][b]` (applied field sampled at
/// nodes) and element-constant load `load_avg[3a+f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix<S> {
    pub k: [[S; 12]; 12],
    pub load: [[S; 4]; 12],
    pub load_avg: [S; 12],
}

/// 1D linear-element integrals on `[0, h]`.
struct Line<S> {
    /// `int N_i' N_j'`
    k: [[S; 2]; 2],
    /// `int N_i N_j`
    m: [[S; 2]; 2],
    /// `int N_i N_j'`
    c: [[S; 2]; 2],
    /// `int N_i`
    i: [S; 2],
    /// `int N_i'`
    d: [S; 2],
}

impl<S: Scalar> Line<S> {
    fn new(h: &S) -> Self {
        let one = S::one();
        let kk = one.clone() / h.clone();
        let m2 = h.clone() * S::ratio(1, 3);
        let m1 = h.clone() * S::ratio(1, 6);
        let half = S::ratio(1, 2);
        Line {
            k: [[kk.clone(), -kk.clone()], [-kk.clone(), kk]],
            m: [[m2.clone(), m1.clone()], [m1, m2]],
            c: [[-half.clone(), half.clone()], [-half.clone(), half.clone()]],
            i: [h.clone() * half.clone(), h.clone() * half],
            d: [-one.clone(), one],
        }
    }
}

fn zero12<S: Scalar>() -> [[S; 12]; 12] {
    core::array::from_fn(|_| core::array::from_fn(|_| S::zero()))
}

/// Element contributions of
///
/// ```text
///   phi: int grad N.grad phi + u int dN/dy dA_y/dz - u int dN/dy dA_z/dy = u int dN/dy B
///   A_y: int grad N.grad A_y + mu sigma int N (dphi/dy + u dA_y/dz - u dA_z/dy) = mu sigma u int N B
///   A_z: int grad N.grad A_z + mu sigma int N dphi/dz = 0
/// ```
///
/// In air the phi rows are `air_phi_weight * Laplace` and the sigma terms
/// drop out.
pub fn element_matrix<S: Scalar>(e: &ElementCoeffs<S>) -> ElementMatrix<S> {
    let z = Line::new(&e.hz);
    let y = Line::new(&e.hy);
    let mut k = zero12::<S>();
    let mut load: [[S; 4]; 12] = core::array::from_fn(|_| core::array::from_fn(|_| S::zero()));
    let mut load_avg: [S; 12] = core::array::from_fn(|_| S::zero());
    let u = &e.u_z;
    let ms = &e.mu_sigma;

    for (a, &(ia, ja)) in LOCAL.iter().enumerate() {
        for (b, &(ib, jb)) in LOCAL.iter().enumerate() {
            let lap = z.k[ia][ib].clone() * y.m[ja][jb].clone() + z.m[ia][ib].clone() * y.k[ja][jb].clone();
            // int N_a dN_b/dz, int N_a dN_b/dy
            let n_dz = z.c[ia][ib].clone() * y.m[ja][jb].clone();
            let n_dy = z.m[ia][ib].clone() * y.c[ja][jb].clone();
            // int dN_a/dy dN_b/dz, int dN_a/dy dN_b/dy, int dN_a/dy N_b
            let dy_dz = z.c[ia][ib].clone() * y.c[jb][ja].clone();
            let dy_dy = z.m[ia][ib].clone() * y.k[ja][jb].clone();
            let dy_n = z.m[ia][ib].clone() * y.c[jb][ja].clone();
            let nn = z.m[ia][ib].clone() * y.m[ja][jb].clone();

            let (rp, ry, rz) = (3 * a + PHI, 3 * a + AY, 3 * a + AZ);
            let (cp, cy, cz) = (3 * b + PHI, 3 * b + AY, 3 * b + AZ);
            k[ry][cy] = lap.clone();
            k[rz][cz] = lap.clone();
            if e.conducting {
                k[rp][cp] = lap;
                k[rp][cy] = u.clone() * dy_dz;
                k[rp][cz] = -(u.clone() * dy_dy);
                load[rp][b] = u.clone() * dy_n;

                k[ry][cp] = ms.clone() * n_dy.clone();
                k[ry][cy] = k[ry][cy].clone() + ms.clone() * u.clone() * n_dz.clone();
                k[ry][cz] = -(ms.clone() * u.clone() * n_dy);
                load[ry][b] = ms.clone() * u.clone() * nn;

                k[rz][cp] = ms.clone() * n_dz;
            } else {
                k[rp][cp] = e.air_phi_weight[a].clone() * lap;
            }
        }
        if e.conducting {
            load_avg[3 * a + PHI] = u.clone() * z.i[ia].clone() * y.d[ja].clone();
            load_avg[3 * a + AY] = ms.clone() * u.clone() * z.i[ia].clone() * y.i[ja].clone();
        }
    }
    ElementMatrix { k, load, load_avg }
}
