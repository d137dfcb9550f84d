use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no records")]
    NoRecords,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for {what} of size {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("rank {rank} exceeds min(rows, cols) = {limit}")]
    RankTooLarge { rank: usize, limit: usize },

    #[error("truncated SVD did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("feature Gram matrix is singular")]
    SingularFeatureGram,

    #[error("basis has no nonzero column")]
    ZeroBasis,

    #[error("unsupported unfolding mode {0}")]
    InvalidMode(usize),

    #[error("correlation undefined for a constant vector")]
    ConstantVector,

    #[error("duplicate coordinate ({0}, {1})")]
    DuplicateEntry(usize, usize),

    #[error("model container: {0}")]
    Format(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    /// Failure inside a named fitting step.
    #[error("{step}: {cause}")]
    Step { step: &'static str, cause: Box<Error> },
}

impl Error {
    pub(crate) fn in_step(self, step: &'static str) -> Self {
        Error::Step { step, cause: Box::new(self) }
    }

    /// The innermost error, looking through step attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { cause, .. } => cause.root(),
            other => other,
        }
    }
}
