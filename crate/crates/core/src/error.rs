use thiserror::Error;

use crate::qmring::Weight;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} has a denominator divisible by {p}; it is not {p}-integral")]
    DenominatorNotPUnit { value: String, p: u64 },

    #[error("unsupported prime {p}: {reason}")]
    UnsupportedPrime { p: u64, reason: &'static str },

    #[error("modulus {p}^{m} does not fit in 64 bits")]
    ModulusTooLarge { p: u64, m: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("weight mismatch: {left} vs {right}")]
    WeightMismatch { left: Weight, right: Weight },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("series is not in the span of the weight {weight} basis (first disagreement at q^{index})")]
    NotInSpan { weight: Weight, index: usize },

    #[error("precision {got} is too small, need at least {needed}")]
    InsufficientPrecision { needed: usize, got: usize },

    #[error("divisor is not monic in X")]
    NotMonicInX,

    #[error("bracket [{x} v {y}] is undefined: x - y must be a non-negative integer")]
    InvalidBracket { x: String, y: String },

    #[error("f_{index} of the Zagier sequence still contains E2 terms")]
    NonModularResidue { index: usize },

    #[error("expected a rational integer, got {0}")]
    NonIntegerResult(String),

    #[error("CM value is supported on t-powers {found:?}, expected only t^{expected}")]
    UnexpectedSupport { expected: usize, found: Vec<usize> },

    #[error("CM value {0} is not integral away from 2 and 3")]
    NormalizationViolated(String),

    #[error("contour estimates disagree by {estimate} (tolerance {tolerance})")]
    PrecisionExhausted { estimate: String, tolerance: String },
}

impl Error {
    /// True for errors that can only come from a bug in this crate, never
    /// from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::NonModularResidue { .. }
                | Error::NonIntegerResult(_)
                | Error::UnexpectedSupport { .. }
                | Error::NormalizationViolated(_)
        )
    }
}
