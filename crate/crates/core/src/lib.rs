//! Exact solver for the loop equations of the Gaussian beta ensemble.

pub mod cache;
pub mod conjecture;
pub mod error;
pub mod exact;
pub mod expr;
pub mod jets;
pub mod merge;
pub mod moments;
pub mod onepoint;
pub mod recursions;
pub mod reference;
pub mod slice;
pub mod solver;
pub mod ycalc;

pub use error::{GbeError, Result};
