//! Reduction to constant real parts.
//!
//! With `A(t) = sum_j int_0^{t_j} (a_j - a_j0)` and `T` the multiplication of
//! `u^(t, xi)` by `e^{i xi A(t)}`, every `L_j` is conjugated to the field with
//! `a_j` replaced by its average: `T L_j T^{-1} = d/dt_j + (a_j0 + i b_j) d/dx`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{FieldError, FourierField};
use crate::gevrey::{exp_composition_derivatives, fit_derivative_base, GevreyError, RealTrig};
use crate::scalar::{cis, uniform_grid};
use crate::solver::{apply_operator, SolverError};
use crate::system::{Coefficient, SystemSpec};

/// Gauge potential plus the normalised system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormData {
    /// `A_j(t_j) = int_0^{t_j} (a_j - a_j0)`, one per variable.
    #[serde(rename = "A")]
    pub a: Vec<RealTrig>,
    pub normalized: SystemSpec,
}

impl NormalFormData {
    /// `A(t)`.
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.a.iter().zip(t).map(|(p, x)| p.eval(*x)).sum()
    }

    /// `true` when `A` vanishes identically.
    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(RealTrig::is_zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeDirection {
    /// Multiply by `e^{+i xi A}`.
    Forward,
    /// Multiply by `e^{-i xi A}`.
    Inverse,
}

pub fn build_normal_form(spec: &SystemSpec) -> NormalFormData {
    let a = spec.tubes.iter().map(|t| t.a.oscillating_part().integral_from_zero()).collect();
    let mut normalized = spec.clone();
    for tube in &mut normalized.tubes {
        if let Coefficient::Trig(_) = tube.a {
            tube.a = Coefficient::Constant(tube.a.average());
        }
    }
    NormalFormData { a, normalized }
}

/// Multiplies each `u^(., xi)` by `e^{+- i xi A}` on the grid.
pub fn apply_gauge(field: &FourierField, data: &NormalFormData, direction: GaugeDirection) -> Result<FourierField, FieldError> {
    if data.a.len() != field.n() {
        return Err(FieldError::GridMismatch(format!("A has {} variables, field has {}", data.a.len(), field.n())));
    }
    let grid = uniform_grid::<f64>(field.nt());
    // per-axis samples of A_j, summed per grid point
    let per_axis: Vec<Vec<f64>> = data.a.iter().map(|p| grid.iter().map(|&t| p.eval(t)).collect()).collect();
    let potential: Vec<f64> = (0..field.grid_len())
        .map(|flat| field.grid_index(flat).iter().enumerate().map(|(d, &k)| per_axis[d][k]).sum())
        .collect();
    let sign = match direction {
        GaugeDirection::Forward => 1.0,
        GaugeDirection::Inverse => -1.0,
    };
    let blocks: Vec<(i64, Vec<Complex<f64>>)> = field
        .modes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(xi, v)| (xi, v.iter().zip(&potential).map(|(z, a)| z * cis(sign * xi as f64 * a)).collect()))
        .collect();
    let mut out = FourierField::zero(field.n(), field.nt());
    for (xi, v) in blocks {
        out.insert(xi, v)?;
    }
    Ok(out)
}

/// `max_j |T L_j T^{-1} u - L~_j u| / max(|L~_j u|, |u|)`.
pub fn conjugation_residual(spec: &SystemSpec, test_field: &FourierField) -> Result<f64, SolverError> {
    let data = build_normal_form(spec);
    let inv = apply_gauge(test_field, &data, GaugeDirection::Inverse)?;
    let mut worst: f64 = 0.0;
    for j in 0..spec.n {
        let conj = apply_gauge(&apply_operator(&spec.tubes[j], j, &inv)?, &data, GaugeDirection::Forward)?;
        let normal = apply_operator(&data.normalized.tubes[j], j, test_field)?;
        let scale = normal.max_abs().max(test_field.max_abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(conj.sub(&normal)?.max_abs() / scale);
    }
    Ok(worst)
}

/// One row of the derivative-growth check for `e^{i xi A}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeGrowthRow {
    pub alpha: u32,
    /// `max_xi e^{-eps xi^{1/s}} sup_t |d^alpha e^{i xi A}| / (alpha!)^s`.
    pub max_ratio: f64,
    /// `max_ratio^{1/alpha}`.
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeGrowthReport {
    pub s: f64,
    pub epsilon: f64,
    pub rows: Vec<GaugeGrowthRow>,
    /// Smallest `C` with `max_ratio <= C^alpha` for every row.
    #[serde(rename = "C")]
    pub c: f64,
    /// Base `h` of a fitted `C h^alpha (alpha!)^s` envelope.
    pub h_fitted: f64,
}

/// Derivatives of `e^{i xi A}` against the Gevrey weight
/// `e^{eps xi^{1/s}} (alpha!)^s`, for `alpha <= max_order`, `1 <= xi <= xi_max`,
/// sup over a grid of `nt` points.
pub fn gauge_growth(a: &RealTrig, s: f64, epsilon: f64, max_order: usize, xi_max: u32, nt: usize) -> Result<GaugeGrowthReport, GevreyError> {
    // derivatives of A: A^{(l)} from the exponential form
    let poly = a.to_complex::<f64>();
    let mut derivs = Vec::with_capacity(max_order);
    let mut d = poly.clone();
    for _ in 0..max_order {
        d = d.derivative();
        derivs.push(d.clone());
    }
    let grid = uniform_grid::<f64>(nt);
    let samples: Vec<Vec<Complex<f64>>> = grid.iter().map(|&t| derivs.iter().map(|p| p.eval(t)).collect()).collect();
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let mut rows = Vec::with_capacity(max_order);
    for alpha in 1..=max_order {
        let mut best: f64 = 0.0;
        for xi in 1..=xi_max {
            let xf = xi as f64;
            let mut sup: f64 = 0.0;
            for row in &samples {
                let g: Vec<Complex<f64>> = row.iter().map(|z| Complex::new(0.0, xf) * z).collect();
                // |e^{i xi A}| = 1, so |d^alpha e^g| = |d^alpha e^g / e^g|
                sup = sup.max(exp_composition_derivatives(&g, alpha)?.norm());
            }
            best = best.max((-epsilon * xf.powf(1.0 / s)).exp() * sup / fact(alpha).powf(s));
        }
        rows.push(GaugeGrowthRow { alpha: alpha as u32, max_ratio: best, root: best.powf(1.0 / alpha as f64) });
    }
    let c = rows.iter().map(|r| r.root).fold(1.0, f64::max);
    let derivs: Vec<(u32, f64)> = rows.iter().map(|r| (r.alpha, r.max_ratio * fact(r.alpha as usize).powf(s))).collect();
    let h_fitted = fit_derivative_base(&derivs, s).map(|(_, h)| h).unwrap_or(f64::NAN);
    Ok(GaugeGrowthReport { s, epsilon, rows, c, h_fitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constant::RealConstant;
    use crate::system::{Order, Tube};

    fn trig(c0: &str, cos: &[&str], sin: &[&str]) -> RealTrig {
        RealTrig::from_strs(c0, cos, sin).unwrap()
    }

    fn one_tube(a: Coefficient) -> SystemSpec {
        SystemSpec::new(Order::Gevrey(2.0), vec![Tube::new(a, trig("0", &[], &["1"]))])
    }

    #[test]
    fn potentials() {
        let nf = build_normal_form(&one_tube(Coefficient::Trig(trig("0", &["1"], &[]))));
        assert_eq!(nf.a[0], trig("0", &[], &["1"]));
        assert!(build_normal_form(&one_tube(Coefficient::Constant(RealConstant::from_ratio(1, 3)))).is_trivial());
        let nf = build_normal_form(&one_tube(Coefficient::Trig(trig("1/2", &["0", "1"], &[]))));
        assert_eq!(nf.a[0], trig("0", &[], &["0", "1/2"]));
        assert_eq!(nf.normalized.tubes[0].a, Coefficient::Constant(RealConstant::from_ratio(1, 2)));
        assert!(build_normal_form(&nf.normalized).is_trivial());
    }

    #[test]
    fn gauge_values_and_round_trip() {
        let nf = build_normal_form(&one_tube(Coefficient::Trig(trig("0", &["1"], &[]))));
        let u = FourierField::from_fn(1, 64, [1], |_, _| Complex::new(1.0, 0.0));
        let g = apply_gauge(&u, &nf, GaugeDirection::Forward).unwrap();
        for flat in 0..64 {
            let t = u.grid_point(flat)[0];
            assert!((g.get(1).unwrap()[flat] - cis(t.sin())).norm() < 1e-15);
        }
        let back = apply_gauge(&g, &nf, GaugeDirection::Inverse).unwrap();
        assert!(back.sub(&u).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn conjugation() {
        let spec = one_tube(Coefficient::Trig(trig("0", &["1"], &[])));
        let u = FourierField::from_fn(1, 128, [1], |_, t| cis(t[0]));
        assert!(conjugation_residual(&spec, &u).unwrap() <= 1e-10);
        let spec = one_tube(Coefficient::Constant(RealConstant::from_ratio(1, 2)));
        assert_eq!(conjugation_residual(&spec, &u).unwrap(), 0.0);
    }

    #[test]
    fn gauge_growth_is_geometric() {
        let r = gauge_growth(&trig("0", &[], &["1"]), 2.0, 1.0, 8, 1024, 32).unwrap();
        assert!(r.c.is_finite() && r.c > 0.0);
        assert!(r.rows.iter().all(|row| row.max_ratio <= r.c.powi(row.alpha as i32) * (1.0 + 1e-12)));
    }
}
