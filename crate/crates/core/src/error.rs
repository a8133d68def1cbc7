//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root directory not found: {0}")]
    RootNotFound(PathBuf),

    #[error("i/o error at {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("xml parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("keyword set is empty")]
    EmptyKeywordSet,

    #[error("malformed keyword file at line {line}: {message}")]
    MalformedKeywordFile { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparam(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("label lists differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input is empty")]
    EmptyInput,

    #[error("invalid margin: {0}")]
    InvalidMargin(f64),

    #[error("unsupported confidence level: {0} (supported: 0.90, 0.95, 0.99)")]
    UnsupportedConfidence(f64),

    #[error("class {label} has fewer than 2 samples")]
    ClassTooSmall { label: String },

    #[error("invalid test fraction: {0}")]
    InvalidFraction(f64),

    #[error("confusion matrix is not square")]
    NonSquare,

    #[error("missing probe metadata for {0}")]
    MissingProbe(String),

    #[error("fetch failed: {0}")]
    Fetch(String),

    #[error("remote resource not found: {0}")]
    RemoteNotFound(String),

    #[error("rate limited (retry after {retry_after_secs}s)")]
    RateLimited { retry_after_secs: u64 },

    #[error("unsupported forge for {0}")]
    UnsupportedForge(String),

    #[error("record is not ready to be addressed")]
    NotReady,

    #[error("record {0} is missing a required label")]
    MissingLabel(String),

    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("unknown category at line {line}: {value:?}")]
    UnknownCategory { line: usize, value: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}
