//! Division by the symbols of the real fields.
//!
//! For `j` in `J` the equations read `i(eta_j + xi a_j0) u^ = f^_j` in the
//! Fourier variables `(eta_J, xi)`. Each mode is divided by the symbol of
//! largest modulus. The averages are evaluated from exact rational
//! enclosures so `xi a_j0 + eta_j` keeps full relative precision even when it
//! nearly cancels.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::constant::RealConstant;
use crate::exact::rational_to_f64;
use crate::field::{FieldError, FourierField};
use crate::spectral::{along_axis, freq_of};
use crate::system::{sign_analysis, SignProfile, SystemSpec};

use super::SolverError;

/// Relative defect tolerated in `d_j f_k = d_k f_j`.
const COMPAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisionSolution {
    pub u: FourierField,
    /// 1-based indices of the real fields.
    pub j: Vec<usize>,
    /// `true` when the `(eta_J, xi) = (0, 0)` mode had a free constant that
    /// was fixed to zero.
    pub zero_mode_fixed: bool,
    /// Largest relative compatibility defect among the `f_j`.
    pub compatibility_defect: f64,
}

fn rational_average(a: &RealConstant, digits: u32) -> Result<BigRational, SolverError> {
    match a.enclose(digits) {
        Ok(e) => Ok(e.center),
        Err(_) => BigRational::from_float(a.to_f64())
            .ok_or_else(|| SolverError::Invalid(format!("average {a} has no finite value"))),
    }
}

/// `xi a` split as `(round, remainder)` so that `round + eta + remainder` is
/// accurate.
fn split(xi: i64, a: &BigRational) -> (i64, f64) {
    let r = a * BigRational::from_integer(BigInt::from(xi));
    let n = r.round();
    let frac = rational_to_f64(&(r - &n));
    (n.to_integer().to_i64().unwrap_or(i64::MAX), frac)
}

/// Solves the real-field equations; `f_list` has one field per tube.
pub fn solve_by_division(spec: &SystemSpec, f_list: &[FourierField], digits: u32) -> Result<DivisionSolution, SolverError> {
    if f_list.len() != spec.n {
        return Err(SolverError::Invalid(format!("{} right-hand sides for {} tubes", f_list.len(), spec.n)));
    }
    let first = &f_list[0];
    if first.n() != spec.n {
        return Err(FieldError::GridMismatch(format!("field has n = {}, system n = {}", first.n(), spec.n)).into());
    }
    for f in f_list {
        first.check_compatible(f)?;
    }
    let j_axes: Vec<usize> = spec
        .tubes
        .iter()
        .enumerate()
        .filter(|(_, t)| sign_analysis(&t.b).profile == SignProfile::IdenticallyZero)
        .map(|(j, _)| j)
        .collect();
    if j_axes.is_empty() {
        return Err(SolverError::Invalid("no real fields: J is empty".into()));
    }
    let rest: Vec<usize> = (0..spec.n).filter(|k| !j_axes.contains(k)).collect();
    let mut averages = Vec::with_capacity(j_axes.len());
    for &j in &j_axes {
        if !spec.tubes[j].a.is_constant() {
            return Err(SolverError::NotNormalized(j));
        }
        averages.push(rational_average(&spec.tubes[j].a.average(), digits)?);
    }

    let nt = first.nt();
    let coeffs: Vec<FourierField> = j_axes.iter().map(|&j| f_list[j].to_coefficients(&j_axes)).collect();
    let mut xis: Vec<i64> = coeffs.iter().flat_map(|c| c.xis().collect::<Vec<_>>()).collect();
    xis.sort_unstable();
    xis.dedup();

    let mut u = FourierField::zero(spec.n, nt);
    let mut worst_defect: f64 = 0.0;
    let mut zero_mode_fixed = false;
    let zero_block = vec![Complex::new(0.0, 0.0); first.grid_len()];
    for xi in xis {
        let parts: Vec<(i64, f64)> = averages.iter().map(|a| split(xi, a)).collect();
        let blocks: Vec<&[Complex<f64>]> = coeffs.iter().map(|c| c.get(xi).unwrap_or(&zero_block)).collect();
        let mut out = vec![Complex::new(0.0, 0.0); first.grid_len()];
        let mut scale: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = first.grid_index(flat);
            let etas: Vec<i64> = j_axes.iter().map(|&j| freq_of(idx[j], nt)).collect();
            if xi == 0 && etas.iter().all(|&e| e == 0) {
                continue;
            }
            let d: Vec<f64> = etas.iter().zip(&parts).map(|(e, (n, frac))| (n + e) as f64 + frac).collect();
            let m = (0..d.len()).fold(0, |m, k| if d[k].abs() > d[m].abs() { k } else { m });
            if d[m].abs() < 1e-300 {
                return Err(SolverError::ZeroDivisor { eta: etas, xi });
            }
            let fm = blocks[m][flat];
            for k in 0..d.len() {
                scale = scale.max(d[k].abs() * blocks[k][flat].norm());
                defect = defect.max((fm * d[k] - blocks[k][flat] * d[m]).norm());
            }
            *slot = -Complex::new(0.0, 1.0) * fm / d[m];
        }
        if scale > 0.0 {
            worst_defect = worst_defect.max(defect / scale);
        }
        if xi == 0 {
            zero_mode_fixed = true;
            if !rest.is_empty() {
                recover_zero_mode(&mut out, f_list, &j_axes, &rest, nt)?;
            }
        }
        u.insert(xi, out)?;
    }
    if worst_defect > COMPAT_TOL {
        return Err(SolverError::Compatibility { defect: worst_defect });
    }
    Ok(DivisionSolution {
        u: u.from_coefficients(&j_axes),
        j: j_axes.iter().map(|j| j + 1).collect(),
        zero_mode_fixed,
        compatibility_defect: worst_defect,
    })
}

/// Fills the `(eta_J, xi) = (0, 0)` slice from `d/dt_k u^ = f^_k`, `k` not
/// in `J`, dividing each `t''` mode by its largest `eta_k`; the mean stays 0.
fn recover_zero_mode(out: &mut [Complex<f64>], f_list: &[FourierField], j_axes: &[usize], rest: &[usize], nt: usize) -> Result<(), SolverError> {
    let all: Vec<usize> = (0..f_list[0].n()).collect();
    let shape = f_list[0].shape();
    let g: Vec<Vec<Complex<f64>>> = rest
        .iter()
        .map(|&k| {
            let full = f_list[k].to_coefficients(&all);
            full.get(0).map(<[_]>::to_vec).unwrap_or_else(|| vec![Complex::new(0.0, 0.0); full.grid_len()])
        })
        .collect();
    let mut slice = vec![Complex::new(0.0, 0.0); out.len()];
    for (flat, z) in slice.iter_mut().enumerate() {
        let idx = f_list[0].grid_index(flat);
        if j_axes.iter().any(|&j| idx[j] != 0) {
            continue;
        }
        let etas: Vec<i64> = rest.iter().map(|&k| freq_of(idx[k], nt)).collect();
        let m = (0..etas.len()).fold(0, |m, k| if etas[k].abs() > etas[m].abs() { k } else { m });
        if etas[m] != 0 {
            *z = g[m][flat] / Complex::new(0.0, etas[m] as f64);
        }
    }
    for &k in rest {
        along_axis(&mut slice, &shape, k, true);
    }
    for (flat, z) in slice.into_iter().enumerate() {
        let idx = f_list[0].grid_index(flat);
        if j_axes.iter().all(|&j| idx[j] == 0) {
            out[flat] = z;
        }
    }
    Ok(())
}
