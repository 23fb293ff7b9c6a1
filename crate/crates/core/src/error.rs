use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<u32>, reason: String },
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<u32>),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-simple pattern: {0}")]
    NonSimple(String),
    #[error("family not canonical: {0}")]
    NotCanonical(String),
    #[error("not a blowup: {0}")]
    NotBlowup(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
