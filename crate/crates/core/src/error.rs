use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{what} is {size}, over the cap of {limit}")]
    Cap { what: String, size: u64, limit: u64 },

    #[error("not a rule theory: {0}")]
    NotRuleTheory(String),

    #[error("belief pair is not consistent")]
    InconsistentPair,

    #[error("illegal refinement: {0}")]
    IllegalRefinement(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, size: u64, limit: u64) -> Error {
        Error::Cap { what: what.into(), size, limit }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
