use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no prime p = 1 (mod {order}) found within {candidates} candidates above 2^{min_bits}")]
    SearchBoundExceeded { order: u64, min_bits: u32, candidates: u64 },

    #[error("{divisor} does not divide the root-of-unity order {order}")]
    NotADivisor { divisor: u64, order: u64 },

    #[error("matrix entries come from different residue fields (mod {left} and mod {right})")]
    MixedContext { left: u64, right: u64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("duplicate time-frequency index ({0}, {1})")]
    DuplicateIndex(usize, usize),

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("value is not a root of unity in the residue field; use the float backend")]
    NonUnimodular,

    #[error("window must not be the zero vector")]
    ZeroWindow,

    #[error("dimension {0} is not supported by this construction (requires N >= 4)")]
    UnsupportedDimension(usize),

    #[error("dimension {n} exceeds the limit {max} for this operation")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("enumeration needs {needed} items, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("profile is not normalized (m_k - k < 0 at k = {0})")]
    UnnormalizedProfile(usize),

    #[error("partition class does not match the column profile")]
    ClassMismatch,

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    #[error("received {received} packets, need at least {needed}")]
    InsufficientPackets { received: usize, needed: usize },

    #[error("analysis system is rank deficient (smallest singular value {sigma_min:e})")]
    RankDeficient { sigma_min: f64 },

    #[error("operator space of {size} shifts is not identifiable in dimension {n}")]
    Ambiguous { size: usize, n: usize },

    #[error("window backend does not match the requested verification backend: {0}")]
    BackendMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
