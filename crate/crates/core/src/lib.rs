//! Finite element solvers and Z-domain stability analysis for conductors
//! moving rectilinearly through an applied magnetic field.
//!
//! The crate is `no_std` (with `alloc`) so the numerics can be embedded
//! anywhere; file formats, configuration and the command line live in the
//! companion `zstab` crate.
//!
//! * [`model`]: materials, meshes, applied-field profiles, Peclet number.
//! * [`fem1d`]: tridiagonal assembly/solve of the 1D induction equation.
//! * [`fem2d`]: coupled (phi, A_y, A_z) assembly/solve on structured quads.
//! * [`ztan`]: exact rational polynomial algebra, transfer functions,
//!   pole-zero certificates and the 2D factorization identities.
//! * [`oracle`]: closed-form nodal solution of the 1D difference equation
//!   and the peak-error formulas.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod banded;
pub mod error;
pub mod fem1d;
pub mod fem2d;
pub mod model;
pub mod oracle;
pub mod ztan;

mod mathf;
mod scalar;

pub use error::{Error, Result};
pub use model::{peclet_of, sample_profile, FieldProfile, Material, Mesh1D, Mesh2D, Peclet, Scheme, MU_0};
pub use scalar::Scalar;
