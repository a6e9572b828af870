use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid environment, policy or experiment definition.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "environment too large for exact oracle: {assignments} joint assignments over {nodes} nodes \
         (cap is {max_nodes} nodes / {max_assignments} assignments)"
    )]
    TooLarge {
        nodes: usize,
        assignments: u128,
        max_nodes: usize,
        max_assignments: u128,
    },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by the user's input rather than by a run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_))
    }
}
