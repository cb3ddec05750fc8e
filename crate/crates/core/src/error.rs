use thiserror::Error;

use crate::residue::ResidueClass;
use crate::Int;

/// Every failure the library can report.
///
/// Input errors (bad literals, violated preconditions) are kept apart from
/// internal failures (overflow, broken invariants) so that front ends can map
/// them to different exit statuses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 1, got {0}")]
    NonPositiveModulus(Int),
    #[error("not a class transposition: classes intersect ({0} and {1})")]
    ClassesIntersect(ResidueClass, ResidueClass),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("modulus {reached} exceeds the limit {limit}")]
    ModulusLimit { reached: Int, limit: Int },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the library.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveModulus(_)
                | Error::ClassesIntersect(..)
                | Error::Parse { .. }
                | Error::Precondition(_)
        )
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
