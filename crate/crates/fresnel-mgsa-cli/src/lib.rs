//! Command-line driver: ingest two grayscale images, run one or all padding
//! strategies, and emit phase masks, reconstructions, traces and a summary.

pub mod config;
pub mod io;
pub mod runner;

pub use config::{RunConfig, StrategyChoice};
pub use runner::{run, RunSummary, StrategyReport};

/// Driver-level error, split by how the process should exit: configuration
/// problems (bad flags, unreadable or mismatched images, invalid physics
/// parameters) versus numerical failures detected while iterating.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit code: 2 for configuration errors, 3 for numerical ones.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<fresnel_mgsa::Error> for CliError {
    fn from(err: fresnel_mgsa::Error) -> Self {
        use fresnel_mgsa::Error as E;
        match err {
            E::NonFinite { .. } | E::ZeroVariance { .. } | E::ZeroReference => {
                CliError::Numerical(err.to_string())
            }
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(err.to_string())
    }
}
