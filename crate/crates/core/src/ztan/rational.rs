//! Rational functions and exact GCDs in up to two Z variables.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;

use super::poly::{Poly, Var};
use super::upoly::UPoly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("denominator is identically zero"));
        }
        Ok(RationalFunction { num, den })
    }

    /// Cancels the exact polynomial GCD and makes the denominator's
    /// lex-leading coefficient one.
    pub fn reduced(&self) -> Result<RationalFunction> {
        if self.num.is_zero() {
            return Ok(RationalFunction {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = gcd(&self.num, &self.den)?;
        let num = self
            .num
            .div_exact(&g)
            .map_err(|r| structural("gcd divides numerator", &r))?;
        let den = self
            .den
            .div_exact(&g)
            .map_err(|r| structural("gcd divides denominator", &r))?;
        let (lc, den) = den.monic();
        Ok(RationalFunction {
            num: num.scale(&lc.recip()),
            den,
        })
    }

    /// The common factor `reduced()` removes.
    pub fn common_factor(&self) -> Result<Poly> {
        if self.num.is_zero() {
            return Ok(self.den.monic().1);
        }
        gcd(&self.num, &self.den)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut v = self.num.variables();
        for w in self.den.variables() {
            if !v.contains(&w) {
                v.push(w);
            }
        }
        v.sort();
        v
    }

    pub fn eval_f64(&self, values: [f64; 3]) -> f64 {
        self.num.eval_f64(values) / self.den.eval_f64(values)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction[{self}]")
    }
}

fn structural(what: &str, r: &Poly) -> Error {
    Error::StructuralFailure {
        what: what.into(),
        remainder: format!("{r}"),
    }
}

/// Exact GCD of polynomials in `Zn` and `Zm` (no `Pe`), normalized to a
/// lex-leading coefficient of one.
pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    for p in [a, b] {
        if p.degree(Var::Pe).unwrap_or(0) > 0 {
            return Err(Error::UnsupportedStructure(
                "gcd is defined here for polynomials in Zn and Zm only".into(),
            ));
        }
    }
    if a.is_zero() {
        return Ok(b.monic().1);
    }
    if b.is_zero() {
        return Ok(a.monic().1);
    }
    let (ca, pa) = primitive(a);
    let (cb, pb) = primitive(b);
    let content = ca.gcd(&cb).to_poly(Var::Zm);
    let (mut x, mut y) = (pa, pb);
    if x.degree(Var::Zn) < y.degree(Var::Zn) {
        core::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        if y.degree(Var::Zn).unwrap_or(0) == 0 {
            // a primitive polynomial free of Zn is a constant
            x = Poly::one();
            break;
        }
        let r = pseudo_rem(&x, &y);
        x = y;
        y = if r.is_zero() { r } else { primitive(&r).1 };
    }
    Ok((&content * &x).monic().1)
}

/// Content over Q[Zm] (as a monic univariate) and primitive part w.r.t. Zn.
fn primitive(p: &Poly) -> (UPoly, Poly) {
    let deg = p.degree(Var::Zn).unwrap_or(0);
    let mut g = UPoly::zero();
    for k in 0..=deg {
        let c = p.coeff_in(Var::Zn, k);
        if c.is_zero() {
            continue;
        }
        let u = UPoly::from_poly(&c, Var::Zm).expect("coefficients are univariate in Zm");
        g = if g.is_zero() { u.monic() } else { g.gcd(&u) };
        if g.degree() == Some(0) {
            break;
        }
    }
    if g.is_zero() {
        return (UPoly::one(), p.clone());
    }
    let pp = p
        .div_exact(&g.to_poly(Var::Zm))
        .expect("content divides every coefficient");
    (g, pp)
}

fn pseudo_rem(a: &Poly, b: &Poly) -> Poly {
    let n = b.degree(Var::Zn).unwrap_or(0);
    let lb = b.leading_in(Var::Zn);
    let mut r = a.clone();
    while !r.is_zero() {
        let m = r.degree(Var::Zn).unwrap_or(0);
        if m < n {
            break;
        }
        let lr = r.leading_in(Var::Zn);
        r = &(&lb * &r) - &(&lr * &b.mul_monomial([m - n, 0, 0]));
    }
    r
}

/// Writes `p = k * f(Zn) * g(Zm)` when the coefficient matrix has rank one.
/// `f` and `g` are normalized to leading coefficient one.
pub fn split_separable(p: &Poly) -> Option<(BigRational, UPoly, UPoly)> {
    if p.is_zero() || p.degree(Var::Pe).unwrap_or(0) > 0 {
        return None;
    }
    let (e0, c0) = p.leading().map(|(e, c)| (*e, c.clone()))?;
    // f(Zn) = column at Zm^{e0[1]}, g(Zm) = row at Zn^{e0[0]} / c0
    let f = p.coeff_in(Var::Zm, e0[1]);
    let g = p.coeff_in(Var::Zn, e0[0]).scale(&c0.recip());
    if &f * &g != *p {
        return None;
    }
    let fu = UPoly::from_poly(&f, Var::Zn)?;
    let gu = UPoly::from_poly(&g, Var::Zm)?;
    let k = fu.leading() * gu.leading();
    Some((k, fu.monic(), gu.monic()))
}

/// True when `den(var = value)` vanishes identically after reduction, i.e.
/// the whole line `var = value` is polar.
pub fn has_pole_line(rf: &RationalFunction, var: Var, value: &BigRational) -> Result<bool> {
    let r = rf.reduced()?;
    Ok(r.den.substitute(var, value).is_zero())
}
