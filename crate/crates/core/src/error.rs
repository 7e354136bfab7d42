use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the admissible set of an operation.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The grid cannot resolve the requested radius or scale.
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures map to one process status, everything the caller
    /// could have avoided maps to another.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Truncation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
