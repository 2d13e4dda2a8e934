use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Unknown slot, value or item for the domain at hand.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An infeasible synthetic-domain specification.
    #[error("invalid domain spec: {0}")]
    Spec(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A policy emitted an act the action mask forbids, or an empty mask was supplied.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Ontology file failed validation.
    #[error("{path}:{line}: {msg}")]
    Validation { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("plot rendering failed: {0}")]
    Plot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
