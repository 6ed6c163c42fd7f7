use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("randomness of scheme `{0}` cannot be enumerated")]
    NotEnumerable(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("message length cannot be split: {0}")]
    IndivisibleLength(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
