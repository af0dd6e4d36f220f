use core::fmt::Debug;
use core::ops::Neg;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};

/// Field element the 2D element integrals are generic over: `f64` for
/// solving, `BigRational` for exact stencil comparisons.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    fn from_int(n: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_i64(n).expect("i64 always converts")
    }
}
