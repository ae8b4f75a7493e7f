use thiserror::Error;

/// Errors raised by evaluators and the verification engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested tolerance cannot be reached within the configured limits.
    #[error("precision error: {0}")]
    Precision(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("extrapolation diverged: {0}")]
    Extrapolation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precision(msg: impl Into<String>) -> Error {
    Error::Precision(msg.into())
}
