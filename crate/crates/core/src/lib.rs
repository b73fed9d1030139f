//! Reduced Racah-Wilson algebra: relation checks, finite-dimensional
//! representations, Racah polynomials, su(1,1) coupling coefficients and
//! the generic superintegrable model on the 2-sphere.

pub mod algebra;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod irreps;
pub mod matrix;
pub mod quartic;
pub mod racah;
pub mod report;
pub mod scalar;
pub mod superint;

pub use error::{Error, Result};
pub use scalar::{Backend, Rational, Scalar};
