use thiserror::Error;

/// Errors raised by ball construction and the gyro-operations built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GyroError {
    #[error("invalid ball parameters: {0}")]
    InvalidParams(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("vector of norm {norm} is not inside the open ball of radius {s}")]
    OutOfBall { norm: f64, s: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live in different balls (s={left_s}, dim={left_dim} vs s={right_s}, dim={right_dim})")]
    ParamsMismatch {
        left_s: f64,
        left_dim: usize,
        right_s: f64,
        right_dim: usize,
    },

    #[error("operation requires dimension {expected}, found {found}")]
    DimensionUnsupported { expected: usize, found: usize },

    #[error("operation requires ball radius s = {expected}, found {found}")]
    RadiusUnsupported { expected: f64, found: f64 },

    #[error("degenerate curve: defining points coincide")]
    DegenerateCurve,

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("not a valid qubit density matrix: {0}")]
    InvalidDensity(String),
}

pub type Result<T> = std::result::Result<T, GyroError>;
