use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("{0}")]
    Domain(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("sweep grid has {points} points, limit is {limit}")]
    SweepTooLarge { points: u128, limit: u128 },

    /// An oracle column disagreed with the closed form beyond tolerance.
    #[error("oracle mismatch in {quantity}: |delta| = {delta:e} at {location} (tolerance {tolerance:e})")]
    OracleMismatch {
        quantity: String,
        delta: f64,
        tolerance: f64,
        location: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
