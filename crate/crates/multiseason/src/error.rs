//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by series construction, detection, fitting, and I/O.
#[derive(Debug, Error)]
pub enum MsError {
    #[error("series must contain at least one observation")]
    EmptySeries,

    #[error("non-finite value at position {index} (1-based)")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("insufficient data for lags: need at least {needed} observations for largest lag {largest_lag}, got {got}")]
    SeriesTooShort {
        needed: usize,
        got: usize,
        largest_lag: usize,
    },

    #[error("line {line}: cannot parse '{content}' as a number")]
    CsvParse { line: usize, content: String },

    #[error("no valid seasonal candidate found: try a shorter tau or a larger max period")]
    DetectionFailed,

    #[error("parameter vector has wrong dimension: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("every candidate model failed to fit:\n{0}")]
    AllSpecsFailed(String),

    #[error("forecast horizon must be at least 1")]
    InvalidHorizon,

    #[error("prediction diverged to a non-finite value at step {step}")]
    NonFinitePrediction { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MsError>;
