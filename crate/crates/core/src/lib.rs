//! Gaussian distribution-shift simulation and probit-scale robustness
//! evaluation.

pub mod cli;
pub mod error;
pub mod gaussian_shift;
pub mod io;
pub mod learners;
pub mod numerics;
pub mod rng;
pub mod scenarios;
pub mod stats;

pub use error::{Error, Result};
