use thiserror::Error;

/// Front-end failure modes, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum ExplorerError {
    #[error("invalid sweep or usage: {0}")]
    Spec(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] mzqubit::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl ExplorerError {
    /// 1 = usage/spec error, 2 = verification failure, 3 = i/o failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            ExplorerError::Spec(_) | ExplorerError::Core(_) => 1,
            ExplorerError::Verification(_) => 2,
            ExplorerError::Io(_) => 3,
            ExplorerError::Serialization(_) => 3,
        }
    }
}
