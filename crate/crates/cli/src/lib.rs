//! Experiment runner: cut verification, training, evaluation, ablation and
//! image encoding, driven by a TOML run config.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod output;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
