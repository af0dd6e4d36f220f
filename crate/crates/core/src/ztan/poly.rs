//! Sparse multivariate polynomials over Q in `Zn`, `Zm` and `Pe`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Indeterminates. `Zn` is the shift along z (flow), `Zm` along y; `Pe`
/// lets the element Peclet number stay symbolic until a limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Zn = 0,
    Zm = 1,
    Pe = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::Zn, Var::Zm, Var::Pe];

    pub fn name(self) -> &'static str {
        match self {
            Var::Zn => "Zn",
            Var::Zm => "Zm",
            Var::Pe => "Pe",
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

pub type Exponent = [u32; 3];

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical sparse polynomial: no zero coefficients are stored, and terms
/// are ordered lexicographically with `Zn > Zm > Pe`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exponent, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::monomial(c, [0, 0, 0])
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(rat(c))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.idx()] = 1;
        Poly::monomial(BigRational::one(), e)
    }

    pub fn monomial(c: BigRational, e: Exponent) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// Builds from `(coefficient, [zn, zm, pe])` pairs; repeated exponents add.
    pub fn from_terms<I: IntoIterator<Item = (BigRational, Exponent)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (c, e) in it {
            p.add_term(e, c);
        }
        p
    }

    /// Integer coefficients on `Zn^a Zm^b`.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        Poly::from_terms(terms.iter().map(|&(c, a, b)| (rat(c), [a, b, 0])))
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(v: Var, coeffs: &[BigRational]) -> Self {
        let mut p = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = [0; 3];
            e[v.idx()] = k as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0, 0, 0])
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exponent) -> BigRational {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Leading term in lex order.
    pub fn leading(&self) -> Option<(&Exponent, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v.idx()]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Variables that occur with a positive exponent.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.degree(*v).unwrap_or(0) > 0)
            .collect()
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_in(&self, v: Var, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[v.idx()] == k {
                let mut e2 = *e;
                e2[v.idx()] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Coefficient of the highest power of `v` (zero for the zero poly).
    pub fn leading_in(&self, v: Var) -> Poly {
        match self.degree(v) {
            Some(d) => self.coeff_in(v, d),
            None => Poly::zero(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, e: Exponent) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| ([k[0] + e[0], k[1] + e[1], k[2] + e[2]], c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn substitute(&self, v: Var, value: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e[v.idx()];
            let mut e2 = *e;
            e2[v.idx()] = 0;
            out.add_term(e2, c * pow_rat(value, k));
        }
        out
    }

    /// Replaces `v` by the polynomial `q`.
    pub fn compose(&self, v: Var, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        let deg = self.degree(v).unwrap_or(0);
        let mut power = Poly::one();
        for k in 0..=deg {
            let c = self.coeff_in(v, k);
            if !c.is_zero() {
                out = &out + &(&c * &power);
            }
            power = &power * q;
        }
        out
    }

    pub fn eval(&self, values: &[BigRational; 3]) -> BigRational {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                t *= pow_rat(&values[i], e[i]);
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, values: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for i in 0..3 {
                    t *= crate::mathf::powi(values[i], e[i] as i64);
                }
                t
            })
            .sum()
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e[v.idx()];
            if k > 0 {
                let mut e2 = *e;
                e2[v.idx()] = k - 1;
                out.add_term(e2, c * rat(k as i64));
            }
        }
        out
    }

    /// Multivariate division by a single divisor in lex order. When `d`
    /// divides `self` exactly the remainder is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (de, dc) = {
            let (e, c) = d.leading().expect("nonzero");
            (*e, c.clone())
        };
        let mut p = self.clone();
        let mut q = Poly::zero();
        let mut r = Poly::zero();
        while let Some((pe, pc)) = p.leading().map(|(e, c)| (*e, c.clone())) {
            if (0..3).all(|i| pe[i] >= de[i]) {
                let shift = [pe[0] - de[0], pe[1] - de[1], pe[2] - de[2]];
                let c = &pc / &dc;
                q.add_term(shift, c.clone());
                p = &p - &d.mul_monomial(shift).scale(&c);
            } else {
                r.add_term(pe, pc.clone());
                p.terms.remove(&pe);
            }
        }
        (q, r)
    }

    /// `Ok(quotient)` when `d` divides exactly, `Err(remainder)` otherwise.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly, Poly> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(r)
        }
    }

    /// Makes the lex-leading coefficient one; returns the factor removed.
    pub fn monic(&self) -> (BigRational, Poly) {
        match self.leading() {
            None => (BigRational::one(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    /// Coefficient list `coeff * Zn^a * Zm^b * Pe^c`, highest first.
    pub fn coefficient_list(&self) -> String {
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&alloc::format!("[{}, {}, {}]: {}", e[0], e[1], e[2], c));
        }
        if s.is_empty() {
            s.push_str("(none)");
        }
        s
    }
}

pub fn pow_rat(x: &BigRational, k: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), k as usize)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let is_const = *e == [0, 0, 0];
            let unit = mag.is_one();
            if !unit || is_const {
                if mag.is_integer() {
                    write!(f, "{}", mag)?;
                } else {
                    write!(f, "({})", mag)?;
                }
            }
            let mut first = unit;
            for v in Var::ALL {
                let k = e[v.idx()];
                if k == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(v.name())?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], x * y);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Shorthands used when transcribing printed polynomials.
pub fn zn() -> Poly {
    Poly::var(Var::Zn)
}

pub fn zm() -> Poly {
    Poly::var(Var::Zm)
}

pub fn pe() -> Poly {
    Poly::var(Var::Pe)
}

pub fn c(n: i64) -> Poly {
    Poly::int(n)
}
