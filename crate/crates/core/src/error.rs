//! Crate-wide error type.

use crate::specfun::SpecfunError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular evaluation: {0}")]
    Singular(&'static str),
    #[error("point lies in a divergence region")]
    DivergenceRegion,
    #[error("unsupported regime: {0}")]
    Unsupported(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Whether the failure is numerical rather than a violated precondition.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
