//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("{func}: domain error: {msg}")]
    Domain { func: &'static str, msg: String },

    /// A series or residue evaluation failed its own accuracy check.
    #[error("{func}: numeric instability: {msg}")]
    Instability { func: &'static str, msg: String },

    /// An iterative procedure ran out of budget before meeting its tolerance.
    #[error("{op}: did not converge: {msg}")]
    NonConvergence { op: String, msg: String },

    /// A model or scenario parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
