use thiserror::Error;

/// Failures of the command-line tool, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Input that is not well-formed JSON or does not match the schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Well-formed input describing an inadmissible object.
    #[error("admissibility error: {0}")]
    Admissibility(String),

    #[error("cap exceeded: {0}")]
    Cap(String),

    /// A verification suite found a counterexample, or an internal
    /// consistency check failed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Schema(_) | CliError::Io { .. } => 2,
            CliError::Admissibility(_) => 3,
            CliError::Cap(_) => 4,
        }
    }
}

impl From<patchalg::Error> for CliError {
    fn from(e: patchalg::Error) -> Self {
        match e {
            patchalg::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            patchalg::Error::Internal(_) => CliError::Verification(e.to_string()),
            _ => CliError::Admissibility(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
