use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed signal file: {0}")]
    Format(String),

    #[error(transparent)]
    Qha(#[from] qha::QhaError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    Threads(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
