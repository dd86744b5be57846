use needle_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 for bad arguments and unreadable inputs, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io(_) => 1,
            Self::Core(CoreError::Format(_) | CoreError::Io(_) | CoreError::Domain(_)) => 1,
            Self::Core(_) | Self::Failed(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
