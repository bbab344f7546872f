use thiserror::Error;

/// Failures of a harness run.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid configuration, with the path of the offending field.
    #[error("usage error at `{path}`: {message}")]
    Usage { path: String, message: String },
    /// A numerical routine failed; `context` names the suite and sample.
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: cubic_ist::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn usage(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Usage { path: path.into(), message: message.into() }
    }

    /// Process exit status: 2 for usage errors, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Attaches suite context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for cubic_ist::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| HarnessError::Numeric { context: what(), source })
    }
}
