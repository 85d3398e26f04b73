//! Experiment runner: configuration, ensemble orchestration,
//! figure-reproduction presets, CSV and plot emission, oracle-comparison
//! reports.

use std::fmt;

pub mod config;
pub mod figures;
pub mod oracle;
pub mod output;
pub mod runner;
pub mod sweep;

pub use config::{GateChoice, SimulationConfig};
pub use figures::{reproduce_figures, FIGURE_PRESETS};
pub use oracle::{compare_oracle, InitialState, OracleOptions, OracleReport};
pub use runner::{run, simulate_rows, RunReport, StepRow};
pub use sweep::{parse_pairs, sweep, SweepRow};

/// Top-level error with a process exit code attached: 1 for configuration
/// problems, 2 for numerical failures, 3 for I/O failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qsd_nmr_core::Error> for CliError {
    fn from(err: qsd_nmr_core::Error) -> Self {
        use qsd_nmr_core::Error::*;
        match err {
            DegenerateState { .. } | TraceDrift { .. } | NonFinite { .. } => {
                CliError::Numerical(err.to_string())
            }
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
