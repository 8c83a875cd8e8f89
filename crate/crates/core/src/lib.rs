//! Torus fixed points, Białynicki-Birula attractor cells and Poincaré
//! polynomials of moduli spaces of stable quiver representations.

pub mod betti;
pub mod cells;
pub mod covering;
pub mod error;
pub mod existence;
pub mod kronecker;
pub mod linalg;
pub mod poly;
pub mod quiver;
pub mod torus;

pub use error::{Error, ErrorKind, Result};
pub use quiver::{euler_form, is_coprime, moduli_dimension, slope, DimensionVector, Quiver, StabilityCondition};
