//! The peak of `(t, r) -> int_{t-r}^{t} b` that drives the Laplace-type
//! lower bound of the singular coefficients.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::gevrey::{RealTrig, TrigPoly};
use crate::scalar::wrap_angle;

use super::SingularError;

/// Grid points per direction of the coarse search.
pub const PROFILE_GRID: usize = 1024;

/// Peaks closer than this to `0` or `2 pi` in `t_0 - r_0` are moved by a
/// translation before a cutoff is placed there.
const BOUNDARY_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceProfile {
    /// Maximum of `int_{t-r}^{t} b`; in the mirror case the (negative)
    /// minimum of `int_t^{t+r} b`.
    #[serde(rename = "B_0")]
    pub b0: f64,
    pub t0: f64,
    pub r0: f64,
    /// `psi''(r_0)` for `psi(r) = int_{t_0-r}^{t_0} b - B_0`, or
    /// `int_{t_0}^{t_0+r} b - B_0` in the mirror case.
    pub psi_curvature: f64,
    pub mirror: bool,
}

/// `b` with its primitive and derivative.
#[derive(Debug, Clone)]
pub(crate) struct Phase {
    pub b: RealTrig,
    pub mean: f64,
    /// `int_0^t (b - mean)`.
    pub primitive: RealTrig,
    db: TrigPoly<f64>,
}

impl Phase {
    pub fn new(b: &RealTrig) -> Self {
        Self { b: b.clone(), mean: b.constant(), primitive: b.integral_from_zero(), db: b.to_complex::<f64>().derivative() }
    }

    /// `int_{t-r}^{t} b`.
    pub fn back(&self, t: f64, r: f64) -> f64 {
        self.mean * r + self.primitive.eval(t) - self.primitive.eval(t - r)
    }

    pub fn db(&self, t: f64) -> f64 {
        self.db.eval(t).re
    }
}

/// Peak of `int_{t-r}^{t} b`: `(t_0, r_0, B_0, b'(t_0 - r_0))`.
pub(crate) fn peak(phase: &Phase) -> Result<(f64, f64, f64, f64), SingularError> {
    let n = PROFILE_GRID;
    let step = TAU / n as f64;
    let q: Vec<f64> = (0..n).map(|i| phase.primitive.eval(step * i as f64)).collect();
    let (mut bi, mut bk, mut best) = (0usize, 0usize, f64::NEG_INFINITY);
    for i in 0..n {
        for k in 0..=n {
            let v = phase.mean * step * k as f64 + q[i] - q[(i + n - k % n) % n];
            if v > best {
                best = v;
                bi = i;
                bk = k;
            }
        }
    }
    if !(best > 0.0) || bk == 0 || bk == n {
        return Err(SingularError::ProfileError("no interior maximum of the phase".into()));
    }
    let (mut t, mut r) = (step * bi as f64, step * bk as f64);
    let mut value = phase.back(t, r);
    for _ in 0..60 {
        let g = [phase.b.eval(t) - phase.b.eval(t - r), phase.b.eval(t - r)];
        let (d1, d2) = (phase.db(t), phase.db(t - r));
        let h = [[d1 - d2, d2], [d2, -d2]];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dt = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dr = -(h[0][0] * g[1] - h[1][0] * g[0]) / det;
        if dt.hypot(dr) > 4.0 * step {
            break;
        }
        let next = phase.back(t + dt, r + dr);
        if next < value - 1e-15 * value.abs().max(1.0) {
            break;
        }
        t += dt;
        r += dr;
        value = next;
        if dt.hypot(dr) < 1e-15 {
            break;
        }
    }
    if !(r > 0.0 && r < TAU && value > 0.0) {
        return Err(SingularError::ProfileError(format!("refined peak r_0 = {r} is not interior")));
    }
    Ok((wrap_angle(t), r, value, phase.db(t - r)))
}

/// Locates the profile of `b`; `mirror` selects the form used when the mean
/// of `b` is positive.
pub fn locate_laplace_profile(b: &RealTrig, mirror: bool) -> Result<LaplaceProfile, SingularError> {
    if mirror {
        let (t, r0, b0, kappa) = peak(&Phase::new(&b.reflected()))?;
        Ok(LaplaceProfile { b0: -b0, t0: wrap_angle(-t), r0, psi_curvature: kappa, mirror })
    } else {
        let (t0, r0, b0, kappa) = peak(&Phase::new(b))?;
        Ok(LaplaceProfile { b0, t0, r0, psi_curvature: -kappa, mirror })
    }
}

/// Coordinates `w = sigma t + shift` in which the mean of `b` is `<= 0` and
/// `t_0 - r_0` sits away from `0` and `2 pi`.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    pub sigma: f64,
    pub shift: f64,
    pub phase: Phase,
    pub a0: f64,
    pub t0: f64,
    pub r0: f64,
    pub b0: f64,
    /// `-psi''(r_0) >= 0`.
    pub kappa: f64,
}

impl Frame {
    pub fn new(a0: f64, b: &RealTrig, mirror: bool) -> Result<Self, SingularError> {
        let (sigma, a0, b) = if mirror { (-1.0, -a0, b.reflected()) } else { (1.0, a0, b.clone()) };
        let (t0, r0, b0, kappa) = peak(&Phase::new(&b))?;
        let w0 = wrap_angle(t0 - r0);
        let shift = if w0.min(TAU - w0) < BOUNDARY_MARGIN { PI - w0 } else { 0.0 };
        let phase = if shift == 0.0 { Phase::new(&b) } else { Phase::new(&b.shifted(shift)) };
        Ok(Self { sigma, shift, phase, a0, t0: wrap_angle(t0 + shift), r0, b0, kappa: kappa.max(0.0) })
    }

    pub fn to_work(&self, t: f64) -> f64 {
        wrap_angle(self.sigma * t + self.shift)
    }

    pub fn from_work(&self, w: f64) -> f64 {
        wrap_angle(self.sigma * (w - self.shift))
    }

    /// Centre `t_0 - r_0` of the cutoff, in working coordinates.
    pub fn centre(&self) -> f64 {
        wrap_angle(self.t0 - self.r0)
    }

    pub fn profile(&self) -> LaplaceProfile {
        let mirror = self.sigma < 0.0;
        LaplaceProfile {
            b0: self.sigma * self.b0,
            t0: self.from_work(self.t0),
            r0: self.r0,
            psi_curvature: if mirror { self.kappa } else { -self.kappa },
            mirror,
        }
    }
}
