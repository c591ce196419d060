//! Experiment runner for the market model in `soc_market`.
//!
//! A run is described by an [`ExperimentConfig`] (TOML). Four commands act
//! on it:
//!
//! * [`commands::cmd_run`] simulates every ensemble seed and writes run
//!   records, checkpoints and a manifest;
//! * [`commands::cmd_walk_stats`] fits the two-branch loser-jump law;
//! * [`commands::cmd_avalanche_stats`] extracts avalanches and fits their
//!   size and duration exponents;
//! * [`commands::cmd_decay_check`] compares the fitted deflation rate with
//!   its mean-field prediction.
//!
//! Every file written embeds the configuration hash, and no output depends
//! on wall-clock time, so reruns from a manifest are byte-identical.

pub mod commands;
pub mod config;
pub mod output;
pub mod setup;

use std::io;
use std::path::PathBuf;

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error(transparent)]
    Model(#[from] soc_market::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Process exit status: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            _ => 2,
        }
    }
}

/// Files produced by a command and the statistics warnings it raised.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}
