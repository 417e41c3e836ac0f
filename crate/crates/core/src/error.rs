use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate generator set")]
    DegenerateGenerators,
    #[error("quotient has torsion")]
    QuotientTorsion,
    #[error("gram form is not positive definite")]
    NotPositiveDefinite,
    #[error("gram form is not symmetric")]
    NotSymmetric,
    #[error("rank cap exceeded: rank {rank} > cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("log value exponent exceeds the size cap of {cap_bits} bits")]
    ExponentCap { cap_bits: u64 },
    #[error("freedom undefined by formula; use convention l = 0")]
    FreedomUndefined,
    #[error("point is critical")]
    CriticalPoint,
    #[error("point does not lie on the variety")]
    NotOnVariety,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty point set")]
    EmptySet,
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
