//! Library side of the `ssbjt` command-line tool.
//!
//! Each `cmd_*` function loads a scenario file, runs one pipeline and writes its
//! CSV/text outputs plus a JSON manifest into an output directory.

pub mod commands;
pub mod format;
pub mod manifest;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{
    cmd_compare, cmd_coverage, cmd_field, cmd_fringe, cmd_select, parse_thresholds, RunContext,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read config {}: {source}", path.display())]
    ConfigIo {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config {}: {source}", path.display())]
    Config {
        path: PathBuf,
        source: ssbjt_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Runtime(#[from] ssbjt_core::Error),
}

impl CliError {
    /// 1 usage, 2 configuration, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::ConfigIo { .. } | CliError::Config { .. } => 2,
            CliError::Io { .. } | CliError::Runtime(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
