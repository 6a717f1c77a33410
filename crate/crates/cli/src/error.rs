use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] satcov::Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for bad input data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_config() => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
