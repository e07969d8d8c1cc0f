use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("modulus polynomial is not irreducible")]
    NotIrreducible,

    #[error("extension degree {0} outside 1..=8")]
    BadExtensionDegree(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has odd size {0}")]
    OddSize(usize),

    #[error("matrix is not skew-symmetric")]
    NotSkew,

    #[error("matrix size {size} exceeds the supported maximum {max}")]
    TooLarge { size: usize, max: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),

    #[error("inexact division: nonzero remainder")]
    NonzeroRemainder,

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("not decomposable: Plücker relation {0:?} violated")]
    NotDecomposable([usize; 4]),

    #[error("point not on {0}")]
    NotOnVariety(String),

    #[error("irregular net: {0}")]
    IrregularNet(String),

    #[error("degenerate net: {0}")]
    DegenerateNet(String),

    #[error("{what}: size {size} exceeds limit {limit}")]
    LimitExceeded { what: String, size: u128, limit: u128 },

    #[error("Hilbert function did not stabilize up to degree {cap}")]
    NoStabilization { cap: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("no acceptable sample after {attempts} attempts")]
    RetryCapExceeded { attempts: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
