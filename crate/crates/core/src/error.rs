use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("signals have no common time span")]
    AlignmentDomain,

    #[error("signals are not aligned: {0}")]
    Misaligned(String),

    #[error("inconsistent data: {0}")]
    DataConsistency(String),

    #[error("no model transition can label event at index {index} (magnitude {magnitude})")]
    ModelCoverage { index: usize, magnitude: f64 },

    #[error("invalid appliance spec: {0}")]
    InvalidSpec(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("config: {0}")]
    Config(String),

    #[error("unsupported schema version {found} in {what} (expected {expected})")]
    Schema {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's data rather than by this crate.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
