//! Trigonometric polynomials, Gevrey decay diagnostics, Gevrey cutoffs and
//! the combinatorics of higher derivatives of `e^g`.

mod cutoff;
mod decay;
mod delta;
mod trig;

pub use cutoff::{gevrey_step, make_cutoff, GevreyCutoff, DFT_NOISE_FLOOR};
pub use decay::{estimate_decay, fit_derivative_base, fit_power_law, DecayOptions, GevreyWitness, PowerFit, MIN_POINTS};
pub use delta::{
    bell_recurrence, check_lemma_product_bound, check_lemma_product_bound_f64, enumerate_delta,
    exp_composition_derivatives, sum_over_delta, DeltaSet, MAX_DELTA_ORDER, MAX_SUM_ORDER,
};
pub use trig::{ExactTrig, RealTrig, TrigPoly, FLOAT_ZERO_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GevreyError {
    #[error("{what} = {value} is outside 1..={max}")]
    OutOfRange { what: &'static str, value: usize, max: usize },
    #[error("insufficient data: need {needed} usable points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid geometry: {0}")]
    GeometryError(String),
    #[error("Gevrey order must exceed 1 here, got {0}")]
    OrderError(f64),
    #[error("malformed input: {0}")]
    Malformed(String),
}
