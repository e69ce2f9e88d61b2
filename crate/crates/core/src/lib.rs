//! Tomographic power of balanced homodyne versus heterodyne moment
//! tomography for single- and two-mode bosonic states.
//!
//! The crate computes Fisher matrices and scaled Cramér–Rao bounds (sCRBs)
//! for first and second moments, their closed forms where they exist, and
//! simulates both measurement schemes to check that the optimal estimators
//! reach those bounds.
//!
//! Units: `hbar = 1` with vacuum quadrature variance `1/2`.

pub mod crb;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod phase_space;
pub mod selftest;
pub mod states;

pub use error::{Error, Result};
