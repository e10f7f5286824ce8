//! Solvers for `L_j u = f_j` in x-Fourier space.
//!
//! [`solve_single_tube`] integrates the ODE in `t_j` for one field whose
//! imaginary part has a fixed sign; [`solve_by_division`] divides by the
//! symbols `i(eta_j + xi a_j0)` of the real fields.

mod division;
mod tube;

use num_complex::Complex;

use crate::field::{FieldError, FourierField};
use crate::gevrey::{estimate_decay, DecayOptions, GevreyError, GevreyWitness};
use crate::scalar::uniform_grid;
use crate::system::{SystemSpec, Tube};

pub use division::{solve_by_division, DivisionSolution};
pub use tube::{prefactor, solve_single_tube, LaplaceKernel, TubeSolveOptions};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("solvability: {0}")]
    Solvability(String),
    #[error("profile: {0}")]
    Profile(String),
    #[error("zero divisor at eta = {eta:?}, xi = {xi}")]
    ZeroDivisor { eta: Vec<i64>, xi: i64 },
    #[error("right-hand sides are incompatible (defect {defect:e})")]
    Compatibility { defect: f64 },
    #[error("tube {0} is not in normal form (its real part is not constant)")]
    NotNormalized(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gevrey(#[from] GevreyError),
    #[error("{0}")]
    Invalid(String),
}

/// `L_j u` for tube `j` (0-based) acting on `t_j`.
pub fn apply_operator(tube: &Tube, axis: usize, u: &FourierField) -> Result<FourierField, SolverError> {
    if axis >= u.n() {
        return Err(FieldError::GridMismatch(format!("tube {axis} on a field with n = {}", u.n())).into());
    }
    let du = u.derivative(axis);
    let grid = uniform_grid::<f64>(u.nt());
    let coef: Vec<Complex<f64>> = grid.iter().map(|&t| Complex::new(tube.a.eval(t), tube.b.eval(t))).collect();
    let stride = u.nt().pow((u.n() - axis - 1) as u32);
    let nt = u.nt();
    Ok(du.map_blocks(|xi, d| {
        let v = u.get(xi).expect("same frequencies");
        d.iter()
            .zip(v)
            .enumerate()
            .map(|(flat, (d, v))| *d + Complex::new(0.0, xi as f64) * coef[(flat / stride) % nt] * *v)
            .collect()
    }))
}

/// `max |L_j u - f_j|` per tube.
pub fn residual(spec: &SystemSpec, u: &FourierField, f_list: &[FourierField]) -> Result<Vec<f64>, SolverError> {
    if f_list.len() != spec.tubes.len() {
        return Err(SolverError::Invalid(format!("{} right-hand sides for {} tubes", f_list.len(), spec.tubes.len())));
    }
    spec.tubes
        .iter()
        .zip(f_list)
        .enumerate()
        .map(|(j, (tube, f))| {
            u.check_compatible(f)?;
            Ok(apply_operator(tube, j, u)?.sub(f)?.max_abs())
        })
        .collect()
}

/// Gevrey decay fit of `max_t |u^(t, xi)|` against `|xi|`.
pub fn decay_report(u: &FourierField, s: f64, opts: &DecayOptions) -> Result<GevreyWitness, SolverError> {
    let mut by_abs = std::collections::BTreeMap::<u64, f64>::new();
    for (xi, m) in u.sup_table() {
        let e = by_abs.entry(xi.unsigned_abs()).or_insert(0.0);
        *e = e.max(m);
    }
    let points: Vec<(f64, f64)> = by_abs.into_iter().filter(|(k, _)| *k > 0).map(|(k, m)| (k as f64, m)).collect();
    Ok(estimate_decay(&points, s, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constant::RealConstant;
    use crate::gevrey::RealTrig;
    use crate::system::{Coefficient, Order};

    #[test]
    fn residual_of_zero_and_linearity_in_perturbation() {
        let tube = Tube::new(Coefficient::Constant(RealConstant::from_ratio(1, 3)), RealTrig::from_strs("-1", &["1/2"], &[]).unwrap());
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![tube]);
        let zero = FourierField::zero(1, 16);
        assert_eq!(residual(&spec, &zero, &[zero.clone()]).unwrap(), vec![0.0]);

        // constant b so the symbol of the perturbed mode is exact
        let tube = Tube::new(Coefficient::Constant(RealConstant::from_ratio(1, 3)), RealTrig::from_strs("-1", &[], &[]).unwrap());
        let spec = SystemSpec::new(Order::Gevrey(2.0), vec![tube.clone()]);
        let u = FourierField::from_fn(1, 16, [2], |_, t| Complex::new(0.0, 3.0 * t[0]).exp());
        let f = apply_operator(&tube, 0, &u).unwrap();
        let mut pert = u.clone();
        let block: Vec<_> = u.get(2).unwrap().iter().map(|z| z * (1.0 + 1e-3)).collect();
        pert.insert(2, block).unwrap();
        let r = residual(&spec, &pert, &[f]).unwrap()[0];
        // |i(eta + xi c0)| with eta = 3, xi = 2, c0 = 1/3 - i
        let symbol: Complex<f64> = Complex::new(0.0, 1.0) * (Complex::new(3.0, 0.0) + 2.0 * Complex::new(1.0 / 3.0, -1.0));
        assert!((r / 1e-3 - symbol.norm()).abs() < 1e-9);
    }
}
