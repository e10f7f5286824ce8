//! Fitting Gevrey-type decay `|c_xi| ~ C xi^{-gamma} e^{-eps xi^{1/s}}` to
//! coefficient magnitudes.
//!
//! The fit runs on the tail-supremum envelope `max_{xi' >= xi} |c_xi'|`, which
//! removes the zeros and oscillations of real coefficient sequences without
//! changing their decay rate. The algebraic factor `xi^{-gamma}` is fitted
//! alongside the stretched exponential so that power laws are not mistaken
//! for slow exponential decay.

use serde::{Deserialize, Serialize};

use super::GevreyError;

/// Minimum number of usable points.
pub const MIN_POINTS: usize = 8;

/// Fit window and floors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub xi_min: f64,
    pub xi_max: f64,
    /// Magnitudes at or below this are treated as underflow.
    pub abs_floor: f64,
    /// When set, the fit stops once the envelope falls below
    /// `rel_floor * max |c|` (round-off floor of computed coefficients).
    pub rel_floor: Option<f64>,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { xi_min: 16.0, xi_max: f64::INFINITY, abs_floor: 1e-300, rel_floor: None }
    }
}

impl DecayOptions {
    pub fn window(xi_min: f64, xi_max: f64) -> Self {
        Self { xi_min, xi_max, ..Self::default() }
    }

    pub fn with_rel_floor(mut self, floor: f64) -> Self {
        self.rel_floor = Some(floor);
        self
    }
}

/// Fitted decay parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyWitness {
    pub s: f64,
    /// Fitted rate `eps`; may come out non-positive when no stretched
    /// exponential decay is present.
    pub epsilon: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Algebraic exponent `gamma`.
    pub gamma: f64,
    pub h: f64,
    /// `false` when `h` was not fitted (no derivative data).
    pub h_fitted: bool,
    pub fit_r2: f64,
    pub points: usize,
    pub xi_range: (f64, f64),
}

/// Linear least squares by modified Gram-Schmidt. Returns the coefficients
/// and `R^2`.
pub(crate) fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    let p = columns.len();
    if n < p || p == 0 {
        return None;
    }
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; p]; p];
    for j in 0..p {
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let qi = q[i].clone();
            q[j].iter_mut().zip(&qi).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = q[j].iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = columns[j].iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        r[j][j] = norm;
        q[j].iter_mut().for_each(|a| *a /= norm);
    }
    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let mut acc = qty[j];
        for k in j + 1..p {
            acc -= r[j][k] * beta[k];
        }
        beta[j] = acc / r[j][j];
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..p).map(|j| columns[j][i] * beta[j]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else if ss_res <= 1e-24 { 1.0 } else { 0.0 };
    Some((beta, r2))
}

/// Windowed, floored tail envelope of `(xi, |c|)` data, sorted by `xi`.
fn prepare(coeffs: &[(f64, f64)], opts: &DecayOptions) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = coeffs
        .iter()
        .filter(|(xi, m)| xi.is_finite() && m.is_finite())
        .map(|&(xi, m)| (xi.abs(), m.abs()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let peak = pts.iter().fold(0.0f64, |m, p| m.max(p.1));
    let mut env = vec![0.0; pts.len()];
    let mut run = 0.0f64;
    for i in (0..pts.len()).rev() {
        run = run.max(pts[i].1);
        env[i] = run;
    }
    let floor = opts.rel_floor.map_or(opts.abs_floor, |r| (r * peak).max(opts.abs_floor));
    pts.iter()
        .zip(env)
        .filter(|((xi, _), _)| *xi >= opts.xi_min && *xi <= opts.xi_max && *xi > 0.0)
        .filter(|(_, e)| *e > floor)
        .map(|(&(xi, _), e)| (xi, e))
        .collect()
}

/// Fits `ln|c| = ln C - gamma ln xi - eps xi^{1/s}` over the window.
pub fn estimate_decay(coeffs: &[(f64, f64)], s: f64, opts: &DecayOptions) -> Result<GevreyWitness, GevreyError> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(GevreyError::OrderError(s));
    }
    let nonzero = coeffs.iter().filter(|(_, m)| m.abs() > opts.abs_floor).count();
    if nonzero < MIN_POINTS {
        return Err(GevreyError::InsufficientData { needed: MIN_POINTS, got: nonzero });
    }
    let pts = prepare(coeffs, opts);
    if pts.len() < MIN_POINTS {
        return Err(GevreyError::InsufficientData { needed: MIN_POINTS, got: pts.len() });
    }
    let ones = vec![1.0; pts.len()];
    let logs: Vec<f64> = pts.iter().map(|p| -p.0.ln()).collect();
    let stretched: Vec<f64> = pts.iter().map(|p| -p.0.powf(1.0 / s)).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (beta, r2) = least_squares(&[ones, logs, stretched], &y)
        .ok_or_else(|| GevreyError::InsufficientData { needed: MIN_POINTS, got: pts.len() })?;
    Ok(GevreyWitness {
        s,
        epsilon: beta[2],
        c: beta[0].exp(),
        gamma: beta[1],
        h: 1.0,
        h_fitted: false,
        fit_r2: r2,
        points: pts.len(),
        xi_range: (pts[0].0, pts[pts.len() - 1].0),
    })
}

/// Fits `h` from derivative sup-norms `(alpha, sup |d^alpha f|)` via
/// `ln sup - s ln alpha! = ln C + alpha ln h`; returns `(h, R^2)`.
pub fn fit_derivative_base(derivs: &[(u32, f64)], s: f64) -> Result<(f64, f64), GevreyError> {
    let pts: Vec<(f64, f64)> = derivs
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(a, v)| {
            let lf: f64 = (1..=a).map(|k| (k as f64).ln()).sum();
            (a as f64, v.ln() - s * lf)
        })
        .collect();
    if pts.len() < 3 {
        return Err(GevreyError::InsufficientData { needed: 3, got: pts.len() });
    }
    let ones = vec![1.0; pts.len()];
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (beta, r2) = least_squares(&[ones, x], &y).ok_or(GevreyError::InsufficientData { needed: 3, got: pts.len() })?;
    Ok((beta[1].exp(), r2))
}

impl GevreyWitness {
    /// Attaches a fitted derivative base.
    pub fn with_derivatives(mut self, derivs: &[(u32, f64)]) -> Result<Self, GevreyError> {
        let (h, _) = fit_derivative_base(derivs, self.s)?;
        self.h = h;
        self.h_fitted = true;
        Ok(self)
    }
}

/// Result of a power-law fit `ln|u| = ln C + p ln xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub r2: f64,
    pub points: usize,
}

/// Least-squares power law over points with `xi` in `[xi_min, xi_max]`.
pub fn fit_power_law(points: &[(f64, f64)], xi_min: f64, xi_max: f64) -> Result<PowerFit, GevreyError> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(xi, m)| *xi >= xi_min && *xi <= xi_max && *xi > 0.0 && *m > 0.0 && m.is_finite())
        .copied()
        .collect();
    if pts.len() < 3 {
        return Err(GevreyError::InsufficientData { needed: 3, got: pts.len() });
    }
    let ones = vec![1.0; pts.len()];
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (beta, r2) = least_squares(&[ones, x], &y).ok_or(GevreyError::InsufficientData { needed: 3, got: pts.len() })?;
    Ok(PowerFit { exponent: beta[1], c: beta[0].exp(), r2, points: pts.len() })
}
