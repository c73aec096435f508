use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("composition {parts:?} sums to {sum}, expected {expected}")]
    CompositionSum {
        parts: Vec<usize>,
        sum: usize,
        expected: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid prime power: {0}")]
    InvalidPrimePower(String),

    #[error("rank r = {r} exceeds the supported maximum {max}")]
    RankTooLarge { r: usize, max: usize },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("Goldman-Rota recurrence disagrees with direct summation at N = {n}, q = {q}")]
    RecurrenceMismatch { n: usize, q: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
