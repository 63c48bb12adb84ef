//! Seeded Monte Carlo sweeps, configuration and CSV output for `gtlab-core`.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{parse_prior, PriorFamily, SweepConfig};
pub use report::{read_csv, write_csv, CsvRow, CSV_HEADER};
pub use sweep::{run_sweep, AlgorithmStats, SweepRow};

use std::path::PathBuf;

use gtlab_core::Algorithm;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] gtlab_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("zero-error violation: algorithm {algorithm} at point {point}, trial {trial} (trial seed {seed:#018x})")]
    ZeroError { algorithm: Algorithm, point: usize, trial: usize, seed: u64 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: header `{found}` does not match the sweep CSV schema")]
    Schema { path: PathBuf, found: String },
    #[error("config parse: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
