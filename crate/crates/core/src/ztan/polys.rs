//! The 2D stencil polynomials, transcribed term by term.

use alloc::format;
use alloc::string::String;

use super::poly::{c, zm, zn, Poly};
use crate::error::{Error, Result};

/// `S1, S2, S3, Q1, Q2, M1, R1, N1` in `Zn` (z shift) and `Zm` (y shift).
#[derive(Debug, Clone, PartialEq)]
pub struct PolySet {
    pub s1: Poly,
    pub s2: Poly,
    pub s3: Poly,
    pub q1: Poly,
    pub q2: Poly,
    pub m1: Poly,
    pub r1: Poly,
    pub n1: Poly,
}

pub const NAMES: [&str; 8] = ["S1", "S2", "S3", "Q1", "Q2", "M1", "R1", "N1"];

/// Coefficient lists `(coeff, Zn power, Zm power)` as printed.
const S1: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (1, 1, 2),
    (1, 0, 2),
    (1, 2, 1),
    (-8, 1, 1),
    (1, 0, 1),
    (1, 2, 0),
    (1, 1, 0),
    (1, 0, 0),
];
const Q2: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (-1, 0, 2),
    (4, 2, 1),
    (-4, 0, 1),
    (1, 2, 0),
    (-1, 0, 0),
];
const S2: &[(i64, u32, u32)] = &[(1, 2, 2), (-1, 0, 2), (-1, 2, 0), (1, 0, 0)];
const S3: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (4, 1, 2),
    (1, 0, 2),
    (-2, 2, 1),
    (-8, 1, 1),
    (-2, 0, 1),
    (1, 2, 0),
    (4, 1, 0),
    (1, 0, 0),
];
const Q1: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (4, 1, 2),
    (1, 0, 2),
    (-1, 2, 0),
    (-4, 1, 0),
    (-1, 0, 0),
];
const M1: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (4, 1, 2),
    (1, 0, 2),
    (4, 2, 1),
    (16, 1, 1),
    (4, 0, 1),
    (1, 2, 0),
    (4, 1, 0),
    (1, 0, 0),
];
const R1: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (2, 1, 2),
    (1, 0, 2),
    (-1, 2, 0),
    (-2, 1, 0),
    (-1, 0, 0),
];
const N1: &[(i64, u32, u32)] = &[
    (1, 2, 2),
    (2, 1, 2),
    (1, 0, 2),
    (2, 2, 1),
    (4, 1, 1),
    (2, 0, 1),
    (1, 2, 0),
    (2, 1, 0),
    (1, 0, 0),
];

pub fn polys_2d() -> PolySet {
    PolySet {
        s1: Poly::from_int_terms(S1),
        s2: Poly::from_int_terms(S2),
        s3: Poly::from_int_terms(S3),
        q1: Poly::from_int_terms(Q1),
        q2: Poly::from_int_terms(Q2),
        m1: Poly::from_int_terms(M1),
        r1: Poly::from_int_terms(R1),
        n1: Poly::from_int_terms(N1),
    }
}

impl PolySet {
    pub fn get(&self, name: &str) -> Option<&Poly> {
        Some(match name {
            "S1" => &self.s1,
            "S2" => &self.s2,
            "S3" => &self.s3,
            "Q1" => &self.q1,
            "Q2" => &self.q2,
            "M1" => &self.m1,
            "R1" => &self.r1,
            "N1" => &self.n1,
            _ => return None,
        })
    }

    fn get_mut(&mut self, name: &str) -> Option<&mut Poly> {
        Some(match name {
            "S1" => &mut self.s1,
            "S2" => &mut self.s2,
            "S3" => &mut self.s3,
            "Q1" => &mut self.q1,
            "Q2" => &mut self.q2,
            "M1" => &mut self.m1,
            "R1" => &mut self.r1,
            "N1" => &mut self.n1,
            _ => return None,
        })
    }

    /// Copy with `Zn*Zm` added to the named polynomial: a negative control
    /// for the verification reports.
    pub fn perturbed(&self, name: &str) -> Result<PolySet> {
        let mut out = self.clone();
        let p = out
            .get_mut(name)
            .ok_or_else(|| Error::invalid(format!("unknown polynomial {name}")))?;
        *p = &*p + &(&zn() * &zm());
        Ok(out)
    }

    /// Text listing of every polynomial and its coefficients.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        for name in NAMES {
            let p = self.get(name).expect("known name");
            s.push_str(&format!("  {name} = {p}\n"));
        }
        s
    }
}

/// Factorized forms the printed lists should expand to; `S1` has none.
pub fn factored_forms() -> [(&'static str, Poly); 7] {
    let zn2m1 = &(&zn() * &zn()) - &c(1);
    let zm2m1 = &(&zm() * &zm()) - &c(1);
    let tn = quad_n();
    let tm = &(&(&zm() * &zm()) + &(&c(4) * &zm())) + &c(1);
    [
        ("Q2", &zn2m1 * &tm),
        ("S2", &zn2m1 * &zm2m1),
        ("S3", &(&zm() - &c(1)).pow(2) * &tn),
        ("Q1", &zm2m1 * &tn),
        ("M1", &tn * &tm),
        ("R1", &zm2m1 * &(&zn() + &c(1)).pow(2)),
        ("N1", &(&zn() + &c(1)).pow(2) * &(&zm() + &c(1)).pow(2)),
    ]
}

/// `Zn^2 + 4 Zn + 1`, whose roots are `-2 +- sqrt(3)`.
pub fn quad_n() -> Poly {
    &(&(&zn() * &zn()) + &(&c(4) * &zn())) + &c(1)
}
