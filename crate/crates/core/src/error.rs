use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NonPrime(u32),
    #[error("field of size {size} exceeds the configured bound {bound}")]
    FieldTooLarge { size: u64, bound: u64 },
    #[error("division by a series indistinguishable from zero at precision {prec}")]
    DivisionByZero { prec: i64 },
    #[error("no solution without extending the field: {obstruction}")]
    Unsolvable { obstruction: String },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("element is not expressible in the tower of this Galois element")]
    NotInTower,
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid tau matrix: {0}")]
    InvalidTau(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("undetermined at precision: {0}")]
    Undetermined(String),
    #[error("element does not lie in N_A: {0}")]
    NotInNA(String),
    #[error("sequence is not strict exact: {0}")]
    NonStrict(String),
    #[error("hypothesis flag absent: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
