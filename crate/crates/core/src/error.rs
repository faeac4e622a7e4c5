use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by any part of the toolkit.
#[derive(Error, Debug)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("no data")]
    EmptyDataset,

    #[error("query {query_id}: feature dimension {found} does not match dataset dimension {expected}")]
    DimensionMismatch {
        query_id: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate query id {0}")]
    DuplicateQueryId(String),

    #[error("need at least {needed} queries to split, found {found}")]
    TooFewQueries { found: usize, needed: usize },

    #[error("split fractions must be non-negative and sum to 1")]
    BadFractions,

    #[error("no relevant documents (average precision is undefined)")]
    NoRelevantDocuments,

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("enumeration would produce {0} actions, over the 10^6 bound")]
    CombinatorialBound(f64),

    #[error("degenerate: differences have zero variance")]
    DegenerateDifferences,

    #[error("too few pairs: {found} nonzero differences, need at least {needed}")]
    TooFewPairs { found: usize, needed: usize },

    #[error("paired inputs have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("model file: {0}")]
    Model(String),
}
