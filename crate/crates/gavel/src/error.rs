//! One error type for the whole harness, mapped onto the process exit
//! codes: 2 for usage/configuration problems, 1 for runtime failures.

use thiserror::Error;

use crate::backend::BackendError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid dataset: {0}")]
    Dataset(#[from] gavel_core::types::DatasetError),
    #[error("invalid scale: {0}")]
    Scale(#[from] gavel_core::scale::ScaleError),
    #[error("invalid judge config: {0}")]
    Prompt(#[from] gavel_core::prompt::PromptError),
    #[error("statistics: {0}")]
    Stats(#[from] gavel_core::stats::StatsError),
    #[error("cache {path}, line {line}: {detail}")]
    MalformedCache { path: String, line: usize, detail: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) | AppError::Config(_) => 2,
            AppError::Backend(BackendError::MissingCredential { .. }) => 2,
            _ => 1,
        }
    }
}
