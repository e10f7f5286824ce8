//! Compactly supported Gevrey cutoffs on `(0, 2 pi)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::decay::{estimate_decay, DecayOptions, GevreyWitness};
use super::GevreyError;

/// Relative round-off floor of DFT-computed cutoff coefficients.
pub const DFT_NOISE_FLOOR: f64 = 1e-13;

/// `phi` with `phi = 1` on the plateau and `phi = 0` off the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyCutoff {
    pub s: f64,
    pub support: (f64, f64),
    pub plateau: (f64, f64),
}

/// Smooth step: `0` for `x <= 0`, `1` for `x >= 1`, built from
/// `psi(x) = exp(-x^{-1/(s-1)})` as `psi(x) / (psi(x) + psi(1-x))`.
pub fn gevrey_step(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let p = 1.0 / (s - 1.0);
    // ratio psi(1-x)/psi(x) = exp(x^{-p} - (1-x)^{-p})
    let e = x.powf(-p) - (1.0 - x).powf(-p);
    if e > 700.0 {
        return 0.0;
    }
    1.0 / (1.0 + e.exp())
}

pub fn make_cutoff(s: f64, support: (f64, f64), plateau: (f64, f64)) -> Result<GevreyCutoff, GevreyError> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(GevreyError::OrderError(s));
    }
    let (l, r) = support;
    let (lp, rp) = plateau;
    let tau = std::f64::consts::TAU;
    if !(0.0 < l && l < lp && lp < rp && rp < r && r < tau) {
        return Err(GevreyError::GeometryError(format!(
            "need 0 < l < l' < r' < r < 2pi, got support {support:?}, plateau {plateau:?}"
        )));
    }
    Ok(GevreyCutoff { s, support, plateau })
}

impl GevreyCutoff {
    /// Value at `t` (not reduced modulo `2 pi`).
    pub fn eval(&self, t: f64) -> f64 {
        let (l, r) = self.support;
        let (lp, rp) = self.plateau;
        gevrey_step((t - l) / (lp - l), self.s) * gevrey_step((r - t) / (r - rp), self.s)
    }

    /// Value of the `2 pi`-periodic extension.
    pub fn eval_periodic(&self, t: f64) -> f64 {
        self.eval(crate::scalar::wrap_angle(t))
    }

    /// Normalised DFT coefficients from `n` samples, FFT order.
    pub fn fourier_coefficients(&self, n: usize) -> Vec<Complex<f64>> {
        let samples: Vec<Complex<f64>> = crate::scalar::uniform_grid::<f64>(n)
            .into_iter()
            .map(|t| Complex::new(self.eval(t), 0.0))
            .collect();
        crate::spectral::forward(&samples)
    }

    /// Fits the decay of the cutoff's own coefficients over
    /// `[xi_min, xi_max]`, using `n = 4 xi_max` samples.
    pub fn verify_decay(&self, xi_min: f64, xi_max: f64) -> Result<GevreyWitness, GevreyError> {
        let n = ((4.0 * xi_max) as usize).next_power_of_two().max(64);
        let c = self.fourier_coefficients(n);
        let data: Vec<(f64, f64)> = (1..n / 2).map(|k| (k as f64, c[k].norm())).collect();
        estimate_decay(&data, self.s, &DecayOptions::window(xi_min, xi_max).with_rel_floor(DFT_NOISE_FLOOR))
    }
}
