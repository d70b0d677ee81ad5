use thiserror::Error;

/// Errors produced by the truncal library.
#[derive(Debug, Error)]
pub enum Error {
    /// A NaN reached an operation that requires ordered numbers.
    #[error("invalid number: NaN is not permitted {0}")]
    InvalidNumber(&'static str),

    /// Vector length does not match the configured dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Truncation configuration violates 2k < d (or d = 0).
    #[error("invalid truncation config: {0}")]
    InvalidConfig(String),

    /// A label outside {-1, +1}.
    #[error("invalid label: {0}")]
    InvalidLabel(String),

    /// An operation that needs data received none.
    #[error("empty dataset")]
    EmptyDataset,

    /// A sign code that no real vector can produce.
    #[error("malformed sign code: {0}")]
    MalformedCode(String),

    /// Brute-force enumeration refused: dimension too large.
    #[error("dimension {d} exceeds brute-force limit {limit}")]
    DimensionLimit { d: usize, limit: usize },

    /// A bound-calculator precondition failed (n > d+1, delta range, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A constructed witness failed its own verification. This signals a
    /// bug in the case analysis, never an expected outcome.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    /// Malformed dataset file content.
    #[error("data format error at row {row}: {message}")]
    DataFormat { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
