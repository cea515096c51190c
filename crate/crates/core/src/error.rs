use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator count mismatch: {0} vs {1}")]
    MismatchedN(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate form")]
    DegenerateForm,
    #[error("odd even-dimension {0}: a symplectic even block needs even size")]
    OddEvenDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
