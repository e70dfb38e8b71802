use thiserror::Error;

/// Failures surfaced by the command-line front end, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical tolerance failure: {0}")]
    Tolerance(String),
    #[error(transparent)]
    Core(#[from] ecsim_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Core(ecsim_core::Error::CutoffTooSmall { .. }) => 3,
            CliError::Core(ecsim_core::Error::InvalidConfig(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
