pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod scenario;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};
