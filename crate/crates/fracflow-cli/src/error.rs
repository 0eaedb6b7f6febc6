use thiserror::Error;

/// Everything that can end a command, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("{0}")]
    Numerical(fracflow::Error),
    #[error("{0} failed its check")]
    CheckFailed(String),
}

impl CliError {
    /// 0 success, 1 numerical failure, 2 usage or configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) | CliError::CheckFailed(_) => 1,
        }
    }
}

impl From<fracflow::Error> for CliError {
    fn from(e: fracflow::Error) -> Self {
        use fracflow::Error as E;
        match e {
            // bad parameters are a configuration problem, not a numerical one
            E::InvalidParameter(msg) => CliError::Config(msg),
            E::Unsupported(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
