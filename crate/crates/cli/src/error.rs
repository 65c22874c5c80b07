use lexibase::StoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 3,
            CliError::Store(e) => match e {
                StoreError::Format { .. }
                | StoreError::Integrity { .. }
                | StoreError::Corruption(_)
                | StoreError::UnsupportedVersion { .. }
                | StoreError::Io(_) => 3,
                _ => 2,
            },
        }
    }
}
