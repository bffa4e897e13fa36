use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the library.
///
/// Precondition failures name the operation and the clause that failed so
/// callers can tell an input problem from an internal one.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition of {operation} violated: {clause}")]
    Precondition {
        operation: &'static str,
        clause: String,
    },

    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A guarantee that the construction is supposed to establish did not
    /// hold. This indicates a bug, not bad input.
    #[error("internal guarantee failed in {operation}: {detail}")]
    Internal {
        operation: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn pre(operation: &'static str, clause: impl Into<String>) -> Self {
        Error::Precondition {
            operation,
            clause: clause.into(),
        }
    }

    pub(crate) fn internal(operation: &'static str, detail: impl Into<String>) -> Self {
        Error::Internal {
            operation,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn cap(what: &'static str, needed: u128, cap: u128) -> Self {
        Error::CapExceeded { what, needed, cap }
    }
}
