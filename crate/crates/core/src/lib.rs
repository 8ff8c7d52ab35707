//! Dynamics of complex polynomials acting on 2x2 complex matrices.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod format;
pub mod green;
pub mod laurent;
pub mod matpoly;
pub mod matrix;
pub mod poly;
pub mod render;
pub mod scalar;
pub mod slice;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Mat2, Spectrum, SpectrumKind, TolerancePolicy};
pub use poly::{Complex, Polynomial};
