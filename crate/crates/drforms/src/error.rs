//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value could not be resolved at the working precision. `needed`
    /// carries a suggestion (e.g. a larger degree bound) when one is known.
    #[error("precision exhausted in {what}{}", match .needed { Some(n) => format!(" (try {n})"), None => String::new() })]
    PrecisionExhausted {
        what: String,
        needed: Option<String>,
    },

    /// Evaluation of a series outside its certified convergence domain.
    #[error("argument outside certified domain: {0}")]
    OutOfDomain(String),

    /// Invalid run configuration or malformed input.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Structural precondition violated (e.g. a matrix not in GL_r(A)).
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn precision(what: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            what: what.into(),
            needed: None,
        }
    }

    pub fn precision_needs(what: impl Into<String>, needed: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            what: what.into(),
            needed: Some(needed.into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
