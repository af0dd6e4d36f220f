//! Banded LU with partial pivoting.
//!
//! Rows are stored densely over the band plus `kl` extra super-diagonals
//! for pivoting fill-in, as in LAPACK's `gbtrf` (transposed to row-major).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mathf::abs;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

/// Diagnostics of a successful solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    /// `||A x - b||_inf`.
    pub residual: f64,
    /// `residual / (||A||_inf ||x||_inf + ||b||_inf)`.
    pub relative_residual: f64,
    /// Ratio of largest to smallest pivot magnitude; a cheap lower bound on
    /// the growth of the condition number, reported for diagnostics only.
    pub condition_estimate: f64,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// # Panics
    /// If `(i, j)` lies outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    /// Zeroes row `i`; used for Dirichlet row replacement.
    pub fn clear_row(&mut self, i: usize) {
        let start = i * self.width;
        self.data[start..start + self.width].fill(0.0);
    }

    /// Nonzero `(column, value)` pairs of row `i` in the band.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku + 1).min(self.n);
        (lo..hi)
            .map(move |j| (j, self.data[self.slot(i, j)]))
            .filter(|(_, v)| *v != 0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| abs(v)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `A x = b`, applies one step of iterative refinement and checks
    /// `||A x - b|| <= bound * (||A|| ||x|| + ||b||)`.
    pub fn solve(&self, b: &[f64], bound: f64) -> Result<(Vec<f64>, SolveStats)> {
        if b.len() != self.n {
            return Err(Error::invalid(format!(
                "rhs length {} does not match matrix dimension {}",
                b.len(),
                self.n
            )));
        }
        let lu = LuFactors::factor(self.clone())?;
        let mut x = lu.solve(b);
        let r = residual(self, &x, b);
        let dx = lu.solve(&r);
        let refined: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        let r2 = residual(self, &refined, b);
        if norm(&r2) <= norm(&r) {
            x = refined;
        }
        let res = norm(&residual(self, &x, b));
        let scale = self.norm_inf() * norm(&x) + norm(b);
        let relative = if scale > 0.0 { res / scale } else { 0.0 };
        let stats = SolveStats {
            residual: res,
            relative_residual: relative,
            condition_estimate: lu.pivot_ratio(),
        };
        if !(relative <= bound) {
            return Err(Error::NumericalFailure {
                reason: format!("relative residual {relative:e} exceeds bound {bound:e}"),
                residual: res,
                condition_estimate: stats.condition_estimate,
            });
        }
        Ok((x, stats))
    }
}

fn residual(a: &BandedMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(abs(*x)))
}

struct LuFactors {
    a: BandedMatrix,
    pivots: Vec<usize>,
}

impl LuFactors {
    fn factor(mut a: BandedMatrix) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let reach = kl + ku;
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = abs(a.data[a.slot(k, k)]);
            for i in k + 1..=last {
                let v = abs(a.data[a.slot(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::NumericalFailure {
                    reason: format!("zero pivot in column {k}"),
                    residual: f64::INFINITY,
                    condition_estimate: f64::INFINITY,
                });
            }
            pivots[k] = p;
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (sk, sp) = (a.slot(k, j), a.slot(p, j));
                    a.data.swap(sk, sp);
                }
            }
            let pivot = a.data[a.slot(k, k)];
            for i in k + 1..=last {
                let sik = a.slot(i, k);
                let l = a.data[sik] / pivot;
                a.data[sik] = l;
                if l == 0.0 {
                    continue;
                }
                let rk = a.slot(k, k);
                let ri = a.slot(i, k);
                for off in 1..=(jmax - k) {
                    a.data[ri + off] -= l * a.data[rk + off];
                }
            }
        }
        Ok(LuFactors { a, pivots })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let a = &self.a;
        let n = a.n;
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            if yk != 0.0 {
                for i in k + 1..=(k + a.kl).min(n - 1) {
                    y[i] -= a.data[a.slot(i, k)] * yk;
                }
            }
        }
        for i in (0..n).rev() {
            let base = a.slot(i, i);
            let mut s = y[i];
            for j in i + 1..=(i + a.kl + a.ku).min(n - 1) {
                s -= a.data[base + (j - i)] * y[j];
            }
            y[i] = s / a.data[base];
        }
        y
    }

    fn pivot_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for k in 0..self.a.n {
            let v = abs(self.a.data[self.a.slot(k, k)]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi / lo
    }
}
