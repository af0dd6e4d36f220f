use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// The linear solve did not meet its residual bound, or hit a zero pivot.
    NumericalFailure {
        reason: String,
        residual: f64,
        condition_estimate: f64,
    },
    /// A transfer function could not be normalized (leading coefficient
    /// vanishes); carries the unreduced numerator/denominator as text.
    SingularNormalization { unreduced: String },
    /// Closed-form expressions were requested outside their range of validity.
    OutOfValidity(String),
    /// Bivariate input that is not in separable form.
    UnsupportedStructure(String),
    /// An exact division or factorization that was expected to hold did not.
    StructuralFailure { what: String, remainder: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::NumericalFailure {
                reason,
                residual,
                condition_estimate,
            } => write!(
                f,
                "numerical failure: {reason} (residual {residual:e}, condition estimate {condition_estimate:e})"
            ),
            Error::SingularNormalization { unreduced } => {
                write!(f, "singular normalization; unreduced form: {unreduced}")
            }
            Error::OutOfValidity(m) => write!(f, "out of validity: {m}"),
            Error::UnsupportedStructure(m) => write!(f, "unsupported structure: {m}"),
            Error::StructuralFailure { what, remainder } => {
                write!(f, "structural failure: {what}; remainder {remainder}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
