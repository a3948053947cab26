use thiserror::Error;

pub type Result<T> = std::result::Result<T, MolrError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolrError {
    #[error("order {0} is outside the supported range 1..={max}", max = crate::MAX_ORDER)]
    OrderOutOfRange(usize),
    #[error("not a permutation of 0..{n}: {detail}")]
    NotAPermutation { n: usize, detail: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("member {member} is not Latin: column {col} repeats symbol {symbol} (row {row})")]
    NotLatin {
        member: usize,
        row: usize,
        col: usize,
        symbol: u8,
    },
    #[error("members {first} and {second} are not orthogonal: pair ({x},{y}) repeats at row {row}, column {col}")]
    NotOrthogonal {
        first: usize,
        second: usize,
        row: usize,
        col: usize,
        x: u8,
        y: u8,
    },
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("rectangle is complete ({k}x{n}); no row can be added")]
    Complete { k: usize, n: usize },
    #[error("tuple is not normalized")]
    NotNormalized,
    #[error("operation requires at least {min} rows, got {got}")]
    TooFewRows { min: usize, got: usize },
    #[error("{0}")]
    Input(String),
}
