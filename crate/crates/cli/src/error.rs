use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration, unreadable input, mismatched grids.
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] qmoire::Error),
    /// Failure writing outputs or any other unexpected condition.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Engine(qmoire::Error::SamplingViolation { .. }) => 3,
            CliError::Engine(
                qmoire::Error::InvalidArgument(_)
                | qmoire::Error::GridMismatch(_)
                | qmoire::Error::OutOfRange(_)
                | qmoire::Error::InvalidBand(_)
                | qmoire::Error::TooFewSamples { .. },
            ) => 2,
            CliError::Engine(_) | CliError::Internal(_) => 1,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub type Result<T> = std::result::Result<T, CliError>;
