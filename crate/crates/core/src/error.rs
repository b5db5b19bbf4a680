use thiserror::Error;

use crate::market::ParetoViolation;

/// Errors produced by market construction, the solvers and the file codecs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("market has no customers")]
    EmptyMarket,

    #[error("expected dimension {expected} but {what} has {found}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        what: String,
    },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("market is not Pareto optimal: {} violating pair(s), first {:?}", .0.len(), .0.first())]
    NotPareto(Vec<ParetoViolation>),

    #[error("every customer was pruned as dominated")]
    AllPruned,

    #[error("{what}: instance size {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("exact 1-D solver requires dimension 1, market has dimension {0}")]
    NotOneDimensional(usize),

    #[error("level constant must be positive, got {0}")]
    NonPositiveLevel(f64),

    #[error("simplex size must be finite and nonnegative, got {0}")]
    InvalidSize(f64),

    #[error("no simplices given")]
    EmptyInput,

    #[error("event {event} precedes candidate birth {birth}")]
    EventBeforeBirth { event: usize, birth: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
