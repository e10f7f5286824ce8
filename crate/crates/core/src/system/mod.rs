//! Systems of tube-type vector fields and the hypoellipticity decision.

mod analyze;
mod decide;
mod sign;
mod spec;

pub use analyze::{analyze, average, SystemAnalysis, TubeAverages};
pub use decide::{
    classify_system, decide, vector_evidence, ComponentEvidence, ComponentStatus, DecideOptions, Decision, Verdict,
    VectorEvidence, Witness,
};
pub use sign::{half_angle_polynomial, sign_analysis, SignProfile, SignReport};
pub use spec::{Coefficient, DiophantineClaim, Order, SystemSpec, Tube};

use crate::constant::ConstantError;
use crate::diophantine::DiophantineError;
use crate::gevrey::GevreyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("malformed system: {0}")]
    Malformed(String),
    #[error("order rejected: {0}")]
    OrderRejected(String),
    #[error("diophantine classification required for the real fields but missing")]
    MissingClassification,
    #[error(transparent)]
    Constant(#[from] ConstantError),
    #[error(transparent)]
    Gevrey(#[from] GevreyError),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
}
