pub mod baselines;
pub mod bregman;
pub mod dirichlet;
pub mod error;
pub mod harness;
pub mod specfun;

pub use error::{Error, Result};
