//! Exact interior stencils of the 2D assembly and their Z-domain
//! counterparts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use super::element::{element_matrix, ElementCoeffs, AY, AZ, LOCAL, PHI};
use crate::model::Scheme;
use crate::scalar::Scalar;
use crate::ztan::poly::{Poly, Var};
use crate::ztan::polys::polys_2d;

/// Dense assembly of a uniform patch without boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformPatch<S> {
    pub nz: usize,
    pub ny: usize,
    /// `3N x 3N`.
    pub k: Vec<Vec<S>>,
    /// Load per nodal field sample, `3N x N`, for each scheme.
    pub load_galerkin: Vec<Vec<S>>,
    pub load_averaged: Vec<Vec<S>>,
}

impl<S: Scalar> UniformPatch<S> {
    pub fn node(&self, n: usize, m: usize) -> usize {
        n * self.ny + m
    }

    pub fn load(&self, scheme: Scheme) -> &[Vec<S>] {
        match scheme {
            Scheme::Galerkin => &self.load_galerkin,
            Scheme::ElementAveraged => &self.load_averaged,
        }
    }

    /// Right-hand side for nodal field samples `b`.
    pub fn rhs(&self, scheme: Scheme, b: &[S]) -> Vec<S> {
        self.load(scheme)
            .iter()
            .map(|row| {
                row.iter()
                    .zip(b)
                    .fold(S::zero(), |acc, (w, x)| acc + w.clone() * x.clone())
            })
            .collect()
    }
}

/// Assembles every element of an `nz x ny` node grid with the same
/// coefficients (which must describe a conducting element).
pub fn uniform_patch<S: Scalar>(nz: usize, ny: usize, coeffs: &ElementCoeffs<S>) -> UniformPatch<S> {
    let n = nz * ny;
    let em = element_matrix(coeffs);
    let mut k = vec![vec![S::zero(); 3 * n]; 3 * n];
    let mut lg = vec![vec![S::zero(); n]; 3 * n];
    let mut la = vec![vec![S::zero(); n]; 3 * n];
    let quarter = S::ratio(1, 4);
    for i in 0..nz - 1 {
        for j in 0..ny - 1 {
            let nodes: [usize; 4] = core::array::from_fn(|l| (i + LOCAL[l].0) * ny + j + LOCAL[l].1);
            for a in 0..4 {
                for f in 0..3 {
                    let r = 3 * nodes[a] + f;
                    let row = 3 * a + f;
                    for b in 0..4 {
                        for g in 0..3 {
                            let c = 3 * nodes[b] + g;
                            k[r][c] = k[r][c].clone() + em.k[row][3 * b + g].clone();
                        }
                        lg[r][nodes[b]] = lg[r][nodes[b]].clone() + em.load[row][b].clone();
                        la[r][nodes[b]] =
                            la[r][nodes[b]].clone() + em.load_avg[row].clone() * quarter.clone();
                    }
                }
            }
        }
    }
    UniformPatch {
        nz,
        ny,
        k,
        load_galerkin: lg,
        load_averaged: la,
    }
}

/// Z-domain rows on a uniform square grid of spacing `h`:
/// `lhs[f][g]` couples row field `f` to unknown `g`, `rhs[f]` multiplies
/// `B_x`. Polynomials are multiplied through by `Zn Zm`, so neighbour
/// `(n + dn, m + dm)` is the coefficient of `Zn^(1+dn) Zm^(1+dm)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZStencil {
    pub lhs: [[Poly; 3]; 3],
    pub rhs_galerkin: [Poly; 3],
    pub rhs_averaged: [Poly; 3],
}

impl ZStencil {
    pub fn rhs(&self, scheme: Scheme) -> &[Poly; 3] {
        match scheme {
            Scheme::Galerkin => &self.rhs_galerkin,
            Scheme::ElementAveraged => &self.rhs_averaged,
        }
    }
}

/// With `Pe = mu sigma u h / 2` these are the printed equations; the phi
/// row carries the opposite overall sign.
pub fn z_stencil(h: &BigRational, mu_sigma: &BigRational, u: &BigRational) -> ZStencil {
    let p = polys_2d();
    let q = |n: i64, d: i64| BigRational::ratio(n, d);
    let third = q(-1, 3);
    let ms_h = mu_sigma * h;
    let msu_h = &ms_h * u;
    let lap = p.s1.scale(&third);
    ZStencil {
        lhs: [
            [
                lap.clone(),
                p.s2.scale(&(u * q(-1, 4))),
                p.s3.scale(&(u * q(1, 6))),
            ],
            [
                p.q1.scale(&(&ms_h * q(1, 12))),
                &lap + &p.q2.scale(&(&msu_h * q(1, 12))),
                p.q1.scale(&(&msu_h * q(-1, 12))),
            ],
            [p.q2.scale(&(&ms_h * q(1, 12))), Poly::zero(), lap],
        ],
        rhs_galerkin: [
            p.q1.scale(&(u * h * q(-1, 12))),
            p.m1.scale(&(&msu_h * h * q(1, 36))),
            Poly::zero(),
        ],
        rhs_averaged: [
            p.r1.scale(&(u * h * q(-1, 8))),
            p.n1.scale(&(&msu_h * h * q(1, 16))),
            Poly::zero(),
        ],
    }
}

fn coeff_at(p: &Poly, dn: isize, dm: isize) -> BigRational {
    if dn.abs() > 1 || dm.abs() > 1 {
        return BigRational::from_int(0);
    }
    p.coeff([(1 + dn) as u32, (1 + dm) as u32, 0])
}

const FIELD: [&str; 3] = ["phi", "A_y", "A_z"];

/// Every entry of every interior row compared with the Z-domain stencil;
/// returns a description of each mismatch.
pub fn compare_patch(patch: &UniformPatch<BigRational>, z: &ZStencil) -> Vec<String> {
    let mut bad = Vec::new();
    for n in 1..patch.nz - 1 {
        for m in 1..patch.ny - 1 {
            let centre = patch.node(n, m);
            for f in [PHI, AY, AZ] {
                let r = 3 * centre + f;
                for nn in 0..patch.nz {
                    for mm in 0..patch.ny {
                        let (dn, dm) = (nn as isize - n as isize, mm as isize - m as isize);
                        let k = patch.node(nn, mm);
                        for g in [PHI, AY, AZ] {
                            let want = coeff_at(&z.lhs[f][g], dn, dm);
                            let got = &patch.k[r][3 * k + g];
                            if *got != want {
                                bad.push(format!(
                                    "node ({n},{m}) {} row, {} at offset ({dn},{dm}): assembled {got}, stencil {want}",
                                    FIELD[f], FIELD[g]
                                ));
                            }
                        }
                        for scheme in Scheme::ALL {
                            let want = coeff_at(&z.rhs(scheme)[f], dn, dm);
                            let got = &patch.load(scheme)[r][k];
                            if *got != want {
                                bad.push(format!(
                                    "node ({n},{m}) {} row, {scheme} load at offset ({dn},{dm}): assembled {got}, stencil {want}",
                                    FIELD[f]
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    bad
}

/// Degree check used by callers that only need the neighbourhood size.
pub fn stencil_radius(z: &ZStencil) -> u32 {
    z.lhs
        .iter()
        .flatten()
        .chain(z.rhs_galerkin.iter())
        .chain(z.rhs_averaged.iter())
        .filter_map(|p| p.degree(Var::Zn).max(p.degree(Var::Zm)))
        .max()
        .unwrap_or(0)
}
