//! Experiment campaigns on top of `priorbo-core`: config parsing, repeated
//! runs, run-record files, summaries, transfer priors and grid oracles.

pub mod commands;
pub mod config;
pub mod error;
pub mod records;
pub mod summary;

pub use error::{CliError, CliResult};
