//! Pole-zero analysis and stability classification.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{rat, Poly, Var};
use super::rational::{split_separable, RationalFunction};
use super::upoly::{roots, Root, RootValue, UPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    /// Every pole strictly inside the unit circle.
    Stable,
    /// Poles on the unit circle, none at -1.
    MarginallyStable,
    /// A pole at exactly -1: sustained node-to-node alternation.
    OscillatoryMarginal,
    /// A pole outside the unit circle.
    Unstable,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::MarginallyStable => "marginally-stable",
            Classification::OscillatoryMarginal => "oscillatory-marginal",
            Classification::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroReport {
    pub var: Var,
    /// Ratio of leading coefficients of the reduced numerator and denominator.
    pub gain: BigRational,
    pub poles: Vec<Root>,
    pub zeros: Vec<Root>,
    /// Roots common to numerator and denominator, removed by exact GCD.
    pub cancelled_pairs: Vec<Root>,
    pub classification: Classification,
    /// Some pole is real, negative and on or outside the unit circle.
    pub oscillatory: bool,
    pub reduced: RationalFunction,
}

impl PoleZeroReport {
    pub fn has_pole_at(&self, q: &BigRational) -> bool {
        self.poles.iter().any(|r| r.value.equals_rational(q))
    }

    pub fn has_zero_at(&self, q: &BigRational) -> bool {
        self.zeros.iter().any(|r| r.value.equals_rational(q))
    }

    pub fn cancelled_at(&self, q: &BigRational) -> bool {
        self.cancelled_pairs.iter().any(|r| r.value.equals_rational(q))
    }

    pub fn pole_multiplicity(&self) -> usize {
        self.poles.iter().map(|r| r.multiplicity).sum()
    }
}

/// Result of [`analyze`]: one report for a univariate function, one per
/// variable for a separable bivariate one.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    Univariate(PoleZeroReport),
    Separable {
        gain: BigRational,
        zn: PoleZeroReport,
        zm: PoleZeroReport,
    },
}

impl Analysis {
    pub fn classification(&self) -> Classification {
        match self {
            Analysis::Univariate(r) => r.classification,
            Analysis::Separable { zn, zm, .. } => zn.classification.max(zm.classification),
        }
    }

    pub fn report_for(&self, v: Var) -> Option<&PoleZeroReport> {
        match self {
            Analysis::Univariate(r) => (r.var == v).then_some(r),
            Analysis::Separable { zn, zm, .. } => match v {
                Var::Zn => Some(zn),
                Var::Zm => Some(zm),
                Var::Pe => None,
            },
        }
    }
}

pub fn analyze(rf: &RationalFunction) -> Result<Analysis> {
    let vars = rf.variables();
    if vars.contains(&Var::Pe) {
        return Err(Error::UnsupportedStructure(
            "Pe must be fixed or eliminated before analysis".into(),
        ));
    }
    match vars.as_slice() {
        [] => Ok(Analysis::Univariate(analyze_univariate(rf, Var::Zn)?)),
        [v] => Ok(Analysis::Univariate(analyze_univariate(rf, *v)?)),
        _ => {
            let r = rf.reduced()?;
            let (kn, nf, ng) = split_separable(&r.num).ok_or_else(|| {
                Error::UnsupportedStructure(format!("numerator is not separable: {}", r.num))
            })?;
            let (kd, df, dg) = split_separable(&r.den).ok_or_else(|| {
                Error::UnsupportedStructure(format!("denominator is not separable: {}", r.den))
            })?;
            let zn = analyze_univariate(
                &RationalFunction::new(nf.to_poly(Var::Zn), df.to_poly(Var::Zn))?,
                Var::Zn,
            )?;
            let zm = analyze_univariate(
                &RationalFunction::new(ng.to_poly(Var::Zm), dg.to_poly(Var::Zm))?,
                Var::Zm,
            )?;
            Ok(Analysis::Separable {
                gain: kn / kd,
                zn,
                zm,
            })
        }
    }
}

/// Poles per variable when only the denominator is separable, which is all
/// a stability verdict needs.
pub fn separable_poles(rf: &RationalFunction) -> Result<(Vec<Root>, Vec<Root>)> {
    let r = rf.reduced()?;
    let (_, df, dg) = split_separable(&r.den)
        .ok_or_else(|| Error::UnsupportedStructure(format!("denominator is not separable: {}", r.den)))?;
    Ok((roots(&df)?, roots(&dg)?))
}

pub fn analyze_univariate(rf: &RationalFunction, v: Var) -> Result<PoleZeroReport> {
    let num = UPoly::from_poly(&rf.num, v)
        .ok_or_else(|| Error::UnsupportedStructure("numerator is not univariate".into()))?;
    let den = UPoly::from_poly(&rf.den, v)
        .ok_or_else(|| Error::UnsupportedStructure("denominator is not univariate".into()))?;
    if den.is_zero() {
        return Err(Error::invalid("denominator is identically zero"));
    }
    let (g, nr, dr) = if num.is_zero() {
        (UPoly::one(), UPoly::zero(), UPoly::one())
    } else {
        let g = num.gcd(&den);
        let nr = num.div_exact(&g).expect("gcd divides");
        let dr = den.div_exact(&g).expect("gcd divides");
        (g, nr, dr)
    };
    let poles = roots(&dr)?;
    let zeros = if nr.is_zero() { Vec::new() } else { roots(&nr)? };
    let cancelled_pairs = roots(&g)?;
    let gain = if nr.is_zero() {
        BigRational::zero()
    } else {
        nr.leading() / dr.leading()
    };
    let classification = classify(&poles);
    let oscillatory = poles
        .iter()
        .any(|p| p.value.is_negative_real() && p.value.cmp_unit_circle() != Ordering::Less);
    let lc = dr.leading().recip();
    let reduced = RationalFunction::new(
        UPoly::new(nr.coeffs().iter().map(|c| c * &lc).collect()).to_poly(v),
        dr.monic().to_poly(v),
    )?;
    Ok(PoleZeroReport {
        var: v,
        gain,
        poles,
        zeros,
        cancelled_pairs,
        classification,
        oscillatory,
        reduced,
    })
}

pub fn classify(poles: &[Root]) -> Classification {
    if poles
        .iter()
        .any(|p| p.value.cmp_unit_circle() == Ordering::Greater)
    {
        Classification::Unstable
    } else if poles.iter().any(|p| p.value.equals_rational(&rat(-1))) {
        Classification::OscillatoryMarginal
    } else if poles.iter().any(|p| p.value.cmp_unit_circle() == Ordering::Equal) {
        Classification::MarginallyStable
    } else {
        Classification::Stable
    }
}

fn write_roots(out: &mut String, label: &str, rs: &[Root]) {
    let _ = write!(out, "  {label}:");
    if rs.is_empty() {
        out.push_str(" (none)");
    }
    for r in rs {
        let tag = match r.value {
            RootValue::Approx(_) => "numeric",
            _ => "exact",
        };
        let _ = write!(out, "\n    {} [multiplicity {}, {tag}]", r.value, r.multiplicity);
    }
    out.push('\n');
}

impl fmt::Display for PoleZeroReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(s, "  variable: {}", self.var.name());
        let _ = writeln!(s, "  reduced: {}", self.reduced);
        let _ = writeln!(s, "  gain: {}", self.gain);
        write_roots(&mut s, "poles", &self.poles);
        write_roots(&mut s, "zeros", &self.zeros);
        write_roots(&mut s, "cancelled pole-zero pairs", &self.cancelled_pairs);
        let _ = writeln!(
            s,
            "  classification: {}{}",
            self.classification.name(),
            if self.oscillatory { " (oscillatory)" } else { "" }
        );
        f.write_str(&s)
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Analysis::Univariate(r) => write!(f, "{r}"),
            Analysis::Separable { gain, zn, zm } => {
                writeln!(f, "  separable, gain {gain}")?;
                write!(f, "{zn}{zm}")
            }
        }
    }
}

/// Numerator factor in `v` of a polynomial that is a product of univariate
/// parts; convenience for reports.
pub fn univariate_part(p: &Poly, v: Var) -> Option<UPoly> {
    let (_, f, g) = split_separable(p)?;
    match v {
        Var::Zn => Some(f),
        Var::Zm => Some(g),
        Var::Pe => None,
    }
}
