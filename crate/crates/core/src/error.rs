use thiserror::Error;

/// Errors produced by instance construction, mechanism handling and LP solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("size cap exceeded: {what} needs {size} cells, cap is {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("allocation of bidder {bidder} is not monotone at profile {profile:?}")]
    NonMonotone { bidder: usize, profile: Vec<usize> },

    #[error("mechanism is not high priced: bidder 1 allocated at profile {profile:?}")]
    NotHighPriced { profile: Vec<usize> },

    #[error("shift transform did not terminate after {0} fixes")]
    NoTermination(usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("schema violation in field `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
