use thiserror::Error;

use crate::action::ActionError;
use crate::dsl::ParseError;
use crate::localize::LocalizeError;
use crate::poly::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid action: {0}")]
    Action(#[from] ActionError),
    #[error("trivial action: {0}")]
    TrivialAction(String),
    #[error("iteration cap of {0} exceeded")]
    CapExceeded(usize),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Action(_) => 3,
            Error::TrivialAction(_) => 4,
            Error::CapExceeded(_) => 5,
            Error::Verification(_) => 6,
            Error::Localize(_) | Error::Poly(_) | Error::Internal(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
