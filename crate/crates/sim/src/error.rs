use thiserror::Error;

pub type SimResult<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] hrn_core::Error),

    #[error("invalid sweep specification:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("csv line {line}: {message}")]
    Schema { line: u64, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub(crate) fn invalid(problem: String) -> Self {
        SimError::Validation(vec![problem])
    }
}
