use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid configuration {parts:?} for k={k}, n={n}")]
    InvalidConfiguration { parts: Vec<i64>, k: usize, n: usize },

    #[error("partition {parts:?} does not fit in the {k}x{width} box")]
    PartitionOutOfBox { parts: Vec<i64>, k: usize, width: usize },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("B_{{{k},{n}}} has {count} vertices, above the cap of {cap}")]
    TooLarge { k: usize, n: usize, count: u128, cap: usize },

    #[error("numerical degradation: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series truncation failed: tail bound {achieved:e} above tolerance {tol:e}")]
    Truncation { achieved: f64, tol: f64 },

    #[error("inconsistent result: {0}")]
    Consistency(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
