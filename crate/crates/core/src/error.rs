use thiserror::Error;

use crate::model::{ClauseId, Var};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown variable x{0}")]
    UnknownVariable(Var),

    #[error("unknown clause id {0}")]
    UnknownClause(ClauseId),

    /// An operation was invoked outside of its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("oracle refuses {vars} variables (cap is {cap})")]
    OracleCap { vars: usize, cap: usize },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
