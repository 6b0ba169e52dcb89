//! Exact lattice point counting in ellipsoids and verified product bounds.
//!
//! Everything here runs over arbitrary-precision rationals: enumeration,
//! successive minima, basis reduction, and the two theorem verifiers
//! (sphere translation certificates and the inductive slicing argument).
//! Floating point appears only in one explicitly advisory volume check.

pub mod bhw;
pub mod campaign;
pub mod enumeration;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod rat;
pub mod reduction;
pub mod report;
pub mod slicing;
pub mod translation;
pub mod types;

pub use error::{Error, Result};
pub use rat::Rat;
pub use types::{Ball, FlagBasis, InnerProductSpace, Lattice};
