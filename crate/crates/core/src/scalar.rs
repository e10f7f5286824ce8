//! Scalar abstraction shared by the floating-point numerics.
//!
//! Exact arithmetic (continued fractions, combinatorial identities, sign
//! certification of rational trigonometric polynomials) runs on
//! [`num_rational::BigRational`]; everything sampled or integrated numerically
//! is generic over [`Real`], which is implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable by every numeric routine in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; saturates instead of failing.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| if x > 0.0 { Self::infinity() } else { Self::neg_infinity() })
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Round-off unit used to scale tolerances.
    #[inline]
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Maximum modulus of a slice of complex values (0 for an empty slice).
pub fn max_abs<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

/// Uniform grid `2 pi k / n`, `k = 0..n`.
pub fn uniform_grid<T: Real>(n: usize) -> Vec<T> {
    let step = T::TAU() / T::from_usize_lossy(n);
    (0..n).map(|k| step * T::from_usize_lossy(k)).collect()
}

/// Reduces an angle into `[0, 2 pi)`.
#[inline]
pub fn wrap_angle<T: Real>(t: T) -> T {
    let tau = T::TAU();
    let r = t % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}
