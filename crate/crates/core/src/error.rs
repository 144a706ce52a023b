use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The caller violated a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A parameter is outside the range where the object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A word length was requested outside the enumerated ball. The true
    /// length is at least `lower_bound`.
    #[error("element outside the enumerated radius, word length >= {lower_bound}")]
    OutOfRange { lower_bound: u32 },

    /// A size guard tripped; the message suggests a parameter change.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An integral or iteration failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The request is well-formed but not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A spec string or config field could not be parsed.
    #[error("parse error in `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_owned(),
            reason: reason.into(),
        }
    }
}
