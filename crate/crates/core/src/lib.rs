//! Entropy conservative and entropy stable discontinuous Galerkin solvers
//! built on quadrature-based projection, lifting, and decoupled SBP-like
//! operators.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod physics;
pub mod refelem;
pub mod solver;
pub mod util;

pub use error::{Error, Result};
