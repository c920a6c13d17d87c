use thiserror::Error;

/// Failure of one invocation, with its process exit status.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(fracns_core::Error),
    #[error("{name}: {0}", name = .0.name())]
    Module(fracns_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// `2` usage, `3` module or IO failure, `4` validation, `5` Diverged, `6` NotConverged.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Config(_) | RunError::Validation(_) => 4,
            RunError::Module(fracns_core::Error::Diverged { .. }) => 5,
            RunError::Module(fracns_core::Error::NotConverged { .. }) => 6,
            RunError::Module(_) | RunError::Io(_) => 3,
        }
    }

    /// Name recorded in the report.
    pub fn name(&self) -> &'static str {
        match self {
            RunError::Usage(_) => "Usage",
            RunError::Config(_) => "Config",
            RunError::Validation(e) | RunError::Module(e) => e.name(),
            RunError::Io(_) => "Io",
        }
    }
}

impl From<fracns_core::Error> for RunError {
    fn from(e: fracns_core::Error) -> Self {
        RunError::Module(e)
    }
}
