use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("Lie algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error("element is not in the maximal ideal: {0}")]
    NotInMaximalIdeal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("not a Maurer-Cartan element: {0}")]
    NotMaurerCartan(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
