use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} outside [{lo}, {hi}]")]
    Index { index: usize, lo: usize, hi: usize },
    #[error("{what} = {value} exceeds cap {cap}")]
    Cap { what: &'static str, value: u64, cap: u64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Lanczos did not converge after {iterations} iterations ({converged} of {wanted} pairs)")]
    NoConvergence { iterations: usize, converged: usize, wanted: usize },
    #[error("eigenvectors required but not stored")]
    MissingVectors,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
