use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] paneitz_core::Error),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Maps a core error raised while validating parameters to a config error.
pub fn invalid<T>(r: paneitz_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Config(e.to_string()))
}
