//! Command-line companion of `lck-core`: JSON configuration and snapshots,
//! CSV and key-value output, the verification runner and the `lck` binary.

use std::path::Path;

pub mod cli;
pub mod config;
pub mod output;
pub mod presets;
pub mod snapshot;
pub mod verify;

/// Errors surfaced by the command line, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid or unreadable configuration (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed input file (exit 2).
    #[error("format error: {0}")]
    Format(String),
    /// File system failure (exit 2).
    #[error("{path}: {source}")]
    Io {
        /// Offending path.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Numerical failure inside the toolkit (exit 3).
    #[error("numerical failure: {0}")]
    Numerical(#[from] lck_core::Error),
    /// Flow could not keep the metric positive (exit 3).
    #[error("flow stopped: {0}")]
    Stall(String),
}

impl CliError {
    /// Attach a path to an IO error.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Format(_) | CliError::Io { .. } => cli::EXIT_USAGE,
            CliError::Numerical(_) | CliError::Stall(_) => cli::EXIT_NUMERICAL,
        }
    }
}
