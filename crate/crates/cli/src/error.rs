use std::path::Path;

/// Failure of a subcommand, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation or invalid input files (exit code 2).
    #[error("{0}")]
    Usage(String),
    /// Something went wrong while doing the work (exit code 1).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        Self::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Runtime(format!("{}: {err}", path.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;
