//! Continued fractions, Liouville-type classification and approximation
//! witnesses.

mod cf;
mod classify;
mod digits;
mod witness;

pub use cf::{ApproxInterval, Convergent, ContinuedFraction, LogInterval, DEFAULT_DIGIT_CAP};
pub use classify::{
    classify, condition_b_check, exp_liouville_score, liouville_exponent_trend, ConditionBRow, DiophantineVerdict,
    EvidenceRow, VerdictKind, DEFAULT_HORIZON,
};
pub use digits::{Digit, DigitSpec};
pub use witness::{scale_witness, LiouvilleWitness, WitnessCheck, WitnessPair};

/// Errors raised by the continued fraction engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiophantineError {
    #[error("digit {index} is not a positive integer: `{text}`")]
    MalformedDigit { index: usize, text: String },
    #[error("digit {index} is not positive")]
    NonPositiveDigit { index: usize },
    #[error("digit stream exhausted: requested {requested}, available {available}")]
    DigitStreamExhausted { requested: usize, available: usize },
    #[error("digit {index} overflows the log-scale representation")]
    DigitOverflow { index: usize },
    #[error("convergent {index} exceeds the exact digit cap of {cap} decimal digits")]
    BeyondExactCap { index: usize, cap: usize },
    #[error("malformed digit stream: {0}")]
    MalformedSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("witness cannot be verified: {0}")]
    Unverifiable(String),
}
