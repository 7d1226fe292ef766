//! Configuration parsing and subcommands behind the `linarg` binary.
//!
//! Every subcommand yields an [`Outcome`]: a machine-readable artifact (CSV
//! or JSON), a short human-readable report and an exit status.

mod commands;
mod config;

pub use commands::{run, Command, Format, Outcome};
pub use config::{element, parse_config, AxiomSettings, Initial, RunConfig, ScanSettings, Shape};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    /// The configuration or the command line was rejected.
    #[error("{0}")]
    Config(String),
    /// A computation failed on a valid configuration.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn numeric(e: impl std::fmt::Display) -> Self {
        CliError::Numeric(e.to_string())
    }
}

/// Round-trip-exact decimal form of a float, as used in every CSV artifact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
