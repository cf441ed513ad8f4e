use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lib(#[from] rescode::Error),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for usage and input errors, 1 for failures of the numerics on valid input.
    pub fn exit_code(&self) -> i32 {
        use rescode::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Output(_) | CliError::Json(_) => 1,
            CliError::Lib(e) => match e {
                E::SupportViolation
                | E::BracketFailure(_)
                | E::FunctionUndefined(_)
                | E::Unsupported(_)
                | E::NotIdempotent(_)
                | E::NotSelfAdjoint(_)
                | E::InvalidPovm(_)
                | E::InvalidDistribution(_) => 1,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
