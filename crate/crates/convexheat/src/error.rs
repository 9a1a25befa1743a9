//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the closure of the domain (distance {excess:.3e} past the boundary)")]
    OutsideDomain { excess: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tangent half-space undefined at {0}")]
    UndefinedTangent(String),

    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
