use thiserror::Error;

/// Harness errors, grouped by the process exit code the CLI maps them to.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Unparseable or inconsistent configuration (exit code 2).
    #[error("config error: {0}")]
    Config(String),

    /// Non-finite state during a run; carries a state dump (exit code 3).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Filesystem trouble (exit code 1).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<bnn_core::Error> for HarnessError {
    fn from(e: bnn_core::Error) -> Self {
        match e {
            bnn_core::Error::Numeric { what, dump } => {
                HarnessError::Numeric(format!("{what}; state: {dump}"))
            }
            other => HarnessError::Config(other.to_string()),
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numeric(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
