use std::path::Path;

use thiserror::Error;

/// Every failure the command line reports, with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input file. Exit code 1.
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    /// File could not be read or written. Exit code 1.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Bad command-line value. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Inputs parse but violate a contract (misaligned series, undefined
    /// metric, overlapping events). Exit code 2.
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::Usage(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub(crate) fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.display().to_string(), line, message: message.into() }
    }

    /// Core errors raised while reading a config file keep their line.
    pub(crate) fn from_config(path: &Path, err: evdisagg_core::Error) -> Self {
        match err {
            evdisagg_core::Error::Config { line, message } => CliError::parse(path, line, message),
            other => CliError::Parse { path: path.display().to_string(), line: 0, message: other.to_string() },
        }
    }
}

impl From<evdisagg_core::Error> for CliError {
    fn from(err: evdisagg_core::Error) -> Self {
        CliError::Invariant(err.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
