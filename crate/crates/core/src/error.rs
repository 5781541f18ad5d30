use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring description: {0}")]
    InvalidDesc(String),
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("divisibility failure: {0}")]
    Divisibility(String),
    #[error("element not in ideal: {0}")]
    NotInIdeal(String),
    #[error("ideal is not square-zero: {0}")]
    NotSquareZero(String),
    #[error("inconsistent decomposition: {0}")]
    InconsistentDecomposition(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
