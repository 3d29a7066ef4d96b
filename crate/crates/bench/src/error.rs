use std::path::PathBuf;

/// Failures of the experiment runner, split by who has to act on them.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// The experiment description or command-line input is unusable.
    #[error("invalid spec: {0}")]
    Spec(String),
    /// A trial or output step failed on valid input.
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BenchError {
    pub fn spec(msg: impl Into<String>) -> Self {
        Self::Spec(msg.into())
    }

    /// Process exit status: 1 for bad input, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Spec(_) => 1,
            Self::Runtime(_) | Self::Io { .. } => 2,
        }
    }
}

impl From<amop::Error> for BenchError {
    fn from(e: amop::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
