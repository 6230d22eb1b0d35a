use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbpError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("function is not H1-admissible: {0}")]
    Admissibility(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("Nehari projection failed: {0}")]
    Projection(String),
    #[error("shooting oracle failed: {0}")]
    Oracle(String),
    #[error("rescaled profile leaves the grid: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, SbpError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SbpError::Domain(msg.into()))
}
