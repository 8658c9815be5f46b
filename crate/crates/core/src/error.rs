use std::path::PathBuf;

use thiserror::Error;

use crate::active::RoundTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or parameter.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Operation not valid in the current state (e.g. averaging before any round).
    #[error("invalid state: {0}")]
    State(String),

    /// A caller broke the query protocol, e.g. claimed a query without a label.
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// The labeling oracle failed mid-run. `partial` holds the rounds that completed.
    #[error("oracle failed at round {round}: {source}")]
    Oracle {
        round: u64,
        #[source]
        source: OracleError,
        partial: Vec<RoundTrace>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

/// Failure reported by a labeling oracle.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("no label available for index {0}")]
    Missing(usize),
    #[error("oracle input closed")]
    Closed,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
