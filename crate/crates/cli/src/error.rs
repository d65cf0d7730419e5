use netfilter_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Annihilated(CoreError),

    #[error("{0}")]
    NoCrossing(CoreError),

    #[error("{0}")]
    Failure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Classifies a core error raised while building or evaluating the
    /// network described by `context`.
    pub fn from_core(context: &str, err: CoreError) -> Self {
        match err {
            CoreError::FilterAnnihilatesState { .. } => CliError::Annihilated(err),
            CoreError::NoCrossing { .. } => CliError::NoCrossing(err),
            other if context.is_empty() => CliError::Config(other.to_string()),
            other => CliError::Config(format!("{context}: {other}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Annihilated(_) => 3,
            CliError::NoCrossing(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError::from_core("", err)
    }
}

pub type CliResult<T> = Result<T, CliError>;
