use thiserror::Error;

use crate::tensor::TensorId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unknown tensor id {0}")]
    UnknownTensor(TensorId),

    /// An intermediate tensor would exceed the configured entry cap.
    #[error("contraction too large: intermediate tensor of {entries} entries exceeds cap {cap}")]
    TooLarge { entries: u128, cap: usize },

    #[error("resource cap exceeded: {0}")]
    Cap(String),

    /// The conditional probability of a postselection event vanished.
    #[error("invalid postselection on qubit {qubit}: outcome probability {probability:e}")]
    InvalidPostselection { qubit: usize, probability: f64 },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("degenerate ground state (gap {0:e})")]
    Degenerate(f64),

    #[error("numeric tolerance failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
