//! One-variable factors `u^_j(t, xi)` of the singular solutions.

use std::f64::consts::TAU;

use num_complex::Complex;

use crate::gevrey::{GevreyCutoff, RealTrig};
use crate::quadrature::graded_capped;
use crate::scalar::cis;

use super::profile::Frame;
use super::SingularError;

/// Above this frequency `|u^(t_0, xi)|` is taken from the Laplace asymptotic.
pub const LAPLACE_SWITCH: f64 = 1e8;

#[derive(Debug, Clone)]
pub(crate) enum Factor {
    /// `e^{-i xi (p/q) t} e^{xi (B(t) - B(t_0))}`.
    Unit { p: i64, q: i64, primitive: RealTrig, t0: f64, b_t0: f64 },
    Laplace(Box<LaplaceFactor>),
    /// `e^{-i xi (p/q) t}`.
    Phase { p: i64, q: i64 },
}

/// `xi (p/q)` for `xi` on a ladder of multiples of `q`.
fn rational_frequency(xi: f64, p: i64, q: i64) -> f64 {
    (xi / q as f64).round() * p as f64
}

impl Factor {
    pub fn value(&self, t: f64, xi: f64) -> Complex<f64> {
        match self {
            Factor::Unit { p, q, primitive, b_t0, .. } => {
                cis(-rational_frequency(xi, *p, *q) * t) * (xi * (primitive.eval(t) - b_t0)).exp()
            }
            Factor::Laplace(f) => f.value(t, xi),
            Factor::Phase { p, q } => cis(-rational_frequency(xi, *p, *q) * t),
        }
    }

    pub fn t0(&self) -> f64 {
        match self {
            Factor::Unit { t0, .. } => *t0,
            Factor::Laplace(f) => f.frame.from_work(f.frame.t0),
            Factor::Phase { .. } => 0.0,
        }
    }

    /// `ln |u^(t_0, xi)|`; `xi` is passed as a float when representable.
    pub fn ln_abs_at_t0(&self, xi: Option<f64>, ln_xi: f64) -> Result<f64, SingularError> {
        match (self, xi) {
            (Factor::Laplace(f), _) => f.ln_abs_at_t0(xi, ln_xi),
            (_, Some(x)) if x <= LAPLACE_SWITCH => Ok(self.value(self.t0(), x).norm().ln()),
            // analytic identity |u^(t_0, xi)| = 1
            _ => Ok(0.0),
        }
    }

    /// Upper bound on `ln sup_t |u^(t, xi)|`.
    pub fn ln_sup(&self) -> f64 {
        match self {
            Factor::Laplace(f) => (2.0 * f.delta).ln(),
            _ => 0.0,
        }
    }

    /// `L u^` for this factor alone: zero except for Laplace factors.
    pub fn rhs(&self, t: f64, xi: f64) -> Complex<f64> {
        match self {
            Factor::Laplace(f) => f.rhs(t, xi),
            _ => Complex::new(0.0, 0.0),
        }
    }
}

/// The factor built from `f^ = (1 - e^{-2 pi i xi c_0}) e^{-B_0 xi}
/// e^{-i xi a_0 (t - t_0)} phi(t)`, evaluated in the working frame.
#[derive(Debug, Clone)]
pub(crate) struct LaplaceFactor {
    pub frame: Frame,
    pub cutoff: GevreyCutoff,
    pub delta: f64,
}

impl LaplaceFactor {
    fn c0(&self) -> Complex<f64> {
        Complex::new(self.frame.a0, self.frame.phase.mean)
    }

    /// `tau`-intervals in `[0, 2 pi]` where `phi(w - tau) != 0`, each with
    /// the shift `m` making `w - tau + 2 pi m` the point inside the support.
    fn support(&self, w: f64) -> Vec<(f64, f64, f64)> {
        let (l, r) = self.cutoff.support;
        (-1..=2)
            .filter_map(|m| {
                let shift = TAU * m as f64;
                let lo = (w - r + shift).max(0.0);
                let hi = (w - l + shift).min(TAU);
                (hi > lo).then_some((lo, hi, shift))
            })
            .collect()
    }

    /// `u^` in working coordinates, with an optional known peak in `tau`.
    pub fn value_work(&self, w: f64, xi: f64, peak_hint: Option<f64>) -> Complex<f64> {
        let fr = &self.frame;
        let width = 0.5 / (xi * fr.kappa.max(1e-3)).sqrt();
        let mut acc = Complex::new(0.0, 0.0);
        for (lo, hi, shift) in self.support(w) {
            let peak = peak_hint.filter(|p| (lo..=hi).contains(p)).unwrap_or_else(|| {
                (0..=64)
                    .map(|i| lo + (hi - lo) * i as f64 / 64.0)
                    .max_by(|a, b| fr.phase.back(w, *a).total_cmp(&fr.phase.back(w, *b)))
                    .unwrap_or(lo)
            });
            let fine = width.min(0.5 * (hi - lo)).max(1e-10);
            for (tau, wt) in graded_capped(lo, hi, peak, fine, self.delta / 16.0) {
                let y = w - tau + shift;
                let phi = self.cutoff.eval(y);
                if phi == 0.0 {
                    continue;
                }
                let amp = (xi * (fr.phase.back(w, tau) - fr.b0)).exp();
                acc += cis(-xi * fr.a0 * (tau + y - fr.t0)) * (wt * amp * phi);
            }
        }
        acc
    }

    pub fn value(&self, t: f64, xi: f64) -> Complex<f64> {
        self.value_work(self.frame.to_work(t), xi, None)
    }

    /// `f^` in working coordinates.
    fn rhs_work(&self, w: f64, xi: f64) -> Complex<f64> {
        let fr = &self.frame;
        let phi = self.cutoff.eval_periodic(w);
        if phi == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let i = Complex::new(0.0, 1.0);
        (Complex::new(1.0, 0.0) - (-i * TAU * xi * self.c0()).exp()) * (-fr.b0 * xi).exp() * cis(-xi * fr.a0 * (w - fr.t0)) * phi
    }

    /// `f^` in the original coordinates: `sigma f_w(sigma t + shift)`.
    pub fn rhs(&self, t: f64, xi: f64) -> Complex<f64> {
        self.rhs_work(self.frame.to_work(t), xi) * self.frame.sigma
    }

    /// `ln sup_t |f^(t, xi)|`.
    pub fn ln_rhs_sup(&self, xi: f64) -> f64 {
        let i = Complex::new(0.0, 1.0);
        (Complex::new(1.0, 0.0) - (-i * TAU * xi * self.c0()).exp()).norm().ln() - self.frame.b0 * xi
    }

    pub fn ln_abs_at_t0(&self, xi: Option<f64>, ln_xi: f64) -> Result<f64, SingularError> {
        match xi {
            Some(x) if x <= LAPLACE_SWITCH => Ok(self.value_work(self.frame.t0, x, Some(self.frame.r0)).norm().ln()),
            _ if self.frame.kappa > 1e-8 => Ok(0.5 * (TAU / self.frame.kappa).ln() - 0.5 * ln_xi),
            _ => Err(SingularError::ProfileError("degenerate peak: no Laplace asymptotic at large frequency".into())),
        }
    }

    /// Frequency beyond which the plateau of the cutoff holds all but
    /// `1e-3` of the Gaussian mass at `t_0`.
    pub fn asymptotic_from(&self) -> f64 {
        let half = self.delta / 2.0;
        2.0 * 1e3f64.ln() / (self.frame.kappa.max(1e-6) * half * half)
    }

    /// `sup |psi''| / 2` over the plateau around `r_0`.
    pub fn proof_a(&self) -> f64 {
        let fr = &self.frame;
        (0..=200)
            .map(|i| fr.r0 - 0.5 * self.delta + self.delta * i as f64 / 200.0)
            .map(|r| fr.phase.db(fr.t0 - r).abs() / 2.0)
            .fold(0.0, f64::max)
    }
}
