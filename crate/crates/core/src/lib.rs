#![no_std]
extern crate alloc;

pub mod acquisition;
pub mod error;
pub mod linalg;
pub mod math;
pub mod optimizer;
pub mod param_space;
pub mod pareto;
pub mod priors;
pub mod rng;
pub mod surrogate;
pub mod tasks;

pub use error::{Error, Result};
