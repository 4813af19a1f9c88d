use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimator, data pipeline and runtime.
#[derive(Debug, Error)]
pub enum Error {
    #[error("data integrity: {0}")]
    DataIntegrity(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index {index} out of range (first valid index is {first_valid})")]
    OutOfRange { index: usize, first_valid: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("training diverged at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },

    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error(transparent)]
    ModelFile(#[from] ModelFileError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Distinct failure kinds when reading a persisted model.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelFileError {
    #[error("not a model file (bad magic bytes)")]
    BadMagic,

    #[error("model file format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("model file checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },

    #[error("model file truncated: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },

    #[error("model file header is inconsistent: {0}")]
    BadHeader(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
