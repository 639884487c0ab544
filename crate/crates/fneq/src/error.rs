use thiserror::Error;

/// Errors produced by parameter construction, canonicalisation, and path
/// building.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{context}: expected length {expected}, got {found}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite component in {0}")]
    NonFinite(&'static str),

    #[error("unit index {index} out of range for h = {h}")]
    IndexOutOfRange { index: usize, h: usize },

    #[error("unit indices must be distinct (both are {0})")]
    IndicesEqual(usize),

    #[error("stale witness: {0}")]
    StaleWitness(String),

    #[error("unit {0} is not blank")]
    NotBlank(usize),

    #[error("trace order {trace_order} does not match canonical rank {rank}")]
    TraceOrderMismatch { trace_order: usize, rank: usize },

    #[error("hidden-unit count {h} exceeds the trace enumeration cap of {cap}")]
    EnumerationCap { h: usize, cap: usize },

    #[error("parameters are not functionally equivalent")]
    NotEquivalent,

    #[error("class is discrete: no continuous path exists for irreducible parameters")]
    DiscreteClass,

    #[error("rank {rank} exceeds h/2 = {} for h = {h}", *.h as f64 / 2.0)]
    RankTooHigh { rank: usize, h: usize },

    #[error("reduced ranks differ between endpoints: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
