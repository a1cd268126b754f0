//! Error classes shared across the whole crate.
//!
//! Every fallible surface maps onto one of these variants so callers (and the
//! CLI exit-code contract) can distinguish config/validation problems from
//! runtime failures without string matching.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor/graph shape mismatch. The message always carries both shapes.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Invalid argument value (non-scalar loss, factor < 1, level out of range).
    #[error("argument error: {0}")]
    Argument(String),

    /// Out-of-range index, naming the offending element.
    #[error("index error: {0}")]
    Index(String),

    /// Training failure (non-finite gradients, divergence).
    #[error("training error: {0}")]
    Training(String),

    /// Graph/mesh construction failure.
    #[error("construction error: {0}")]
    Construction(String),

    /// Timestamp outside a model's validity window.
    #[error("range error: {0}")]
    Range(String),

    /// Configuration rejected during validation.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed file contents (magic, version, dimensions, truncation).
    #[error("format error: {0}")]
    Format(String),

    /// Row-level ingestion failure, with the offending line number.
    #[error("ingest error: {0}")]
    Ingest(String),

    /// Driver alignment failure (gap exceeding the configured bound).
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Train/val/test split construction failure.
    #[error("split error: {0}")]
    Split(String),

    /// Sequence sampling produced nothing.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Autoregressive rollout failure (missing forcing, non-finite output).
    #[error("rollout error: {0}")]
    Rollout(String),

    /// Evaluation contract violation (event overlaps the training mask).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 2 for config/validation problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Argument(_) => 2,
            _ => 1,
        }
    }
}
