//! Exact rational matrices and subspace algebra.
//!
//! Every rank, dimension and membership decision in the geometric layer is
//! made here, in exact arithmetic.

mod matrix;
pub mod rational;
mod subspace;

pub use matrix::RationalMatrix;
pub use rational::Rational;
pub use subspace::{coordinates, contains, image, intersect, kernel, preimage, restriction_matrix, sum, Subspace};
