//! Regularity of tube systems `L_j = d/dt_j + (a_j + i b_j)(t_j) d/dx` on
//! the torus `T^{n+1}`.
//!
//! The crate decides hypoellipticity from the coefficients, solves
//! `L_j u = f_j` in Fourier space when the system is hypoelliptic, and builds
//! singular solutions when it is not. Numerics are generic over [`Real`];
//! the aliases at the crate root fix the scalar to `f64`.

pub mod constant;
pub mod diophantine;
pub mod exact;
pub mod field;
pub mod gevrey;
pub mod normalform;
pub mod quadrature;
pub mod scalar;
pub mod singular;
pub mod solver;
pub mod spectral;
pub mod system;

pub use constant::{ConstantError, Enclosure, RealConstant};
pub use scalar::Real;
pub use diophantine::{ContinuedFraction, DigitSpec, LiouvilleWitness};
pub use singular::{Certificate, SingularError, SingularOptions, SingularSolution};
pub use solver::SolverError;
pub use system::{Decision, Order, SystemSpec, Verdict};

/// Fourier field with `f64` samples.
pub type Field = field::FourierField<f64>;
/// Complex trigonometric polynomial with `f64` coefficients.
pub type Trig = gevrey::TrigPoly<f64>;
