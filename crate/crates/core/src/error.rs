use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("exact arithmetic overflow: {0}")]
    Overflow(String),

    #[error("resample budget of {attempts} attempts exhausted: {reason}")]
    ResampleExhausted { attempts: u32, reason: String },

    #[error("no λ draw in {attempts} attempts kept every path on the grid: {reason}")]
    RetryExhausted { attempts: u32, reason: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no path from {from} to {to}")]
    NoPath { from: u32, to: u32 },

    #[error("invalid edge-set proposal: {0}")]
    InvalidProposal(String),

    #[error("malformed archive: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
