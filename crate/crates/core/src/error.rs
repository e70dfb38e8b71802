use thiserror::Error;

/// Errors raised by state construction, transformation and measurement.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("revival order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("mode index {index} out of range for a {modes}-mode state")]
    InvalidMode { index: usize, modes: usize },
    #[error("beamsplitter needs two distinct modes, got {0} twice")]
    SameMode(usize),
    #[error("mode-count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("reduced-state eigenvalue has imaginary part {0:e}")]
    ComplexEigenvalue(f64),
    #[error("photon-number cap {cap} leaves residual probability {residual:e}")]
    CutoffTooSmall { cap: usize, residual: f64 },
    #[error("bridge to the number basis supports at most 2 modes, got {0}")]
    TooManyModes(usize),
    #[error("invalid teleportation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
