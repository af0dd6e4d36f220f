//! Exact Z-domain analysis of the discrete schemes.

pub mod analysis;
pub mod poly;
pub mod polys;
pub mod proof;
pub mod rational;
pub mod tf;
pub mod upoly;

pub use analysis::{analyze, separable_poles, Analysis, Classification, PoleZeroReport};
pub use poly::{Poly, Var};
pub use polys::{polys_2d, PolySet};
pub use proof::{verify_all, verify_identity_denominator, verify_identity_numerator, ProofReport};
pub use rational::{has_pole_line, RationalFunction};
pub use tf::{tf_1d, tf_2d, tf_2d_shortcut, LeadingOrder, PecletValue};
pub use upoly::{Root, RootValue, UPoly};
