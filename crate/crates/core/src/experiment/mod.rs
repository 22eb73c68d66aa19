//! Impurity-chain sweep, randomized invariant fuzzing and plotting.

pub mod fuzz;
pub mod plot;
pub mod random;
pub mod sweep;

use std::path::Path;

use thiserror::Error;

pub use fuzz::{run_fuzz, FuzzConfig, FuzzError, FuzzFamily, FuzzReport};
pub use plot::{emit_plot, render_svg};
pub use sweep::{log_spaced_grid, read_sweep_csv, run_sweep, write_sweep_csv, SweepConfig, SweepRow, SWEEP_CSV_HEADER};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sweep point h0 = {h0}: {reason}")]
    SweepPoint { h0: f64, reason: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed sweep file: {0}")]
    Parse(String),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io { path: path.display().to_string(), source }
    }
}
