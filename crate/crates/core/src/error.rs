use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("invalid character {found:?} at position {position}: words use only '+' and '-'")]
    InvalidCharacter { position: usize, found: char },

    #[error("move {mv} does not apply: {reason}")]
    InapplicableMove { mv: String, reason: String },

    #[error("{0} is a two-component link, not a knot")]
    LinkNotKnot(String),

    #[error("invalid fraction {0}")]
    InvalidFraction(String),

    #[error("index {0} is congruent to 2 mod 3")]
    InvalidResidue(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown knot {0:?}")]
    UnknownKnot(String),

    #[error("n = {n} exceeds the enumeration limit {max}; use the sampler instead")]
    TooLarge { n: usize, max: usize },

    #[error("malformed name table, line {line}: {reason}")]
    NameTable { line: usize, reason: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl KnotError {
    /// True for failures of internal consistency checks, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, KnotError::Internal(_))
    }
}

pub type Result<T, E = KnotError> = std::result::Result<T, E>;
