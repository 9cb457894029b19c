/// Failures of a command, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    /// Two independent computations disagreed.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::CrossCheck(_) => 3,
        }
    }
}

impl From<tauto_core::Error> for CliError {
    fn from(e: tauto_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
