use thiserror::Error;

/// Errors shared across the crate. Variants are named after the condition
/// they guard so callers can match on the failure mode directly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distribution is not absolutely continuous: p({symbol}) > 0 but q({symbol}) = 0")]
    AbsoluteContinuityViolated { symbol: usize },

    #[error("divergence order alpha must lie strictly in (0,1), got {0}")]
    BadOrder(f64),

    #[error("channel must have at least two inputs, got M = {0}")]
    DegenerateChannel(usize),

    #[error("product alphabet of size {size} exceeds the enumeration budget {budget}")]
    AlphabetTooLarge { size: u128, budget: u128 },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("ring window w = {w} must satisfy 1 <= w < n/2 for n = {n}")]
    BadWindow { n: usize, w: usize },

    #[error("invalid graph shape: {0}")]
    BadShape(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("instance too large to enumerate: {0}")]
    TooLargeToEnumerate(String),

    #[error("vertex coordinates required but not supplied")]
    MissingCoordinates,

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("exhaustive search space of {0} hypotheses exceeds the budget")]
    SearchSpaceTooLarge(u128),

    #[error("infeasible experiment config: {0}")]
    InfeasibleConfig(String),

    #[error("sweep never crosses the requested level")]
    NoCrossing,

    #[error("argument {0} outside [0,1]")]
    OutOfRange(f64),

    #[error("stated precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
