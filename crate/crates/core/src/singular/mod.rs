//! Singular solutions: `u` with every `L_j u` Gevrey while the coefficients
//! of `u` itself stay large along a frequency ladder.

mod build;
mod compose;
mod factor;
mod profile;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact::ln_biguint;
use crate::field::{FieldError, FourierField};
use crate::gevrey::{fit_power_law, GevreyCutoff, GevreyError, GevreyWitness, PowerFit};
use crate::scalar::uniform_grid;
use crate::solver::SolverError;

pub use build::{build_prop51, build_prop52};
pub use compose::{build_expliouville_j, build_for_system, build_product, build_rational_j, convergent_witness};
pub use profile::{locate_laplace_profile, LaplaceProfile, PROFILE_GRID};

use factor::Factor;

/// Check key: lower end of the window of the `u_t0` decay fit.
pub const U_FIT_FROM: &str = "u_fit_xi_min";

#[derive(Debug, thiserror::Error)]
pub enum SingularError {
    #[error("b must have zero mean here (mean {0})")]
    MeanNotZero(f64),
    #[error("no usable Laplace profile: {0}")]
    ProfileError(String),
    #[error("Gevrey order must exceed 1, got {0}")]
    OrderError(f64),
    #[error("ladder mismatch: {0}")]
    LadderMismatch(String),
    #[error("q a_j0 is not an integer for tube {tube}")]
    IntegralityError { tube: usize },
    #[error("witness does not fit the construction: {0}")]
    WitnessMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Gevrey(#[from] GevreyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diophantine(#[from] crate::diophantine::DiophantineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    Prop51,
    Prop52,
    Product,
    RationalJ,
    ExpLiouvilleJ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// Unit modulus at `t_0`, rational average.
    Unit,
    /// Laplace integral, `~ xi^{-1/2}` at `t_0`.
    Laplace,
    /// Pure phase on a real field.
    Phase,
}

/// Tuning of the builders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularOptions {
    /// Gevrey order used by the decay fits.
    pub s: f64,
    /// Largest ladder frequency of Laplace factors.
    pub xi_max: u64,
    /// Ladder length for unit factors.
    pub k_max: usize,
    /// Grid points per variable of the materialised coefficients.
    pub nt: usize,
    /// Number of leading ladder entries materialised on the grid.
    pub field_rows: usize,
    /// Window of the power-law fit of `|u^(t_0, xi)|`.
    pub power_window: (f64, f64),
}

impl Default for SingularOptions {
    fn default() -> Self {
        Self { s: 2.0, xi_max: 4096, k_max: 64, nt: 256, field_rows: 16, power_window: (64.0, 4096.0) }
    }
}

/// `|u^(t_0, xi)|` and its certified lower bound at one ladder frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub xi: String,
    pub ln_xi: f64,
    pub value: f64,
    pub ln_value: f64,
    pub lower: f64,
    pub ln_lower: f64,
}

/// Size of a right-hand side at one ladder frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsRow {
    pub xi: String,
    /// 1-based tube, or `None` for a bound over all real fields at once.
    pub tube: Option<usize>,
    /// `ln sup_t |f^_j(t, xi)|`, or an upper bound for it.
    pub ln_sup: f64,
    /// Claimed bound `ln(q e^{-eps xi^{1/s}} sup |v^|)`, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    /// Rate `eps` realised by this row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_row: Option<f64>,
}

/// Per-variable data of a singular solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeCertificate {
    /// 1-based variable.
    pub tube: usize,
    pub kind: FactorKind,
    pub a0: f64,
    pub t0: f64,
    /// Certified lower bound of `|u^_j(t_0j, xi)|` along the ladder.
    pub lower: Vec<f64>,
    pub ln_lower: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<LaplaceProfile>,
    /// Half-width of the cutoff support.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Translation applied to `t` before placing the cutoff.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<GevreyCutoff>,
    /// `C` with `|u^(t_0, xi)| >= C / sqrt(xi)` on the ladder.
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c_fit: Option<f64>,
    /// `sqrt(pi / A)`, `A = sup |psi''| / 2` near `r_0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub construction: Vec<Construction>,
    pub ladder: Vec<String>,
    /// Number of Laplace factors (exponent of the `xi^{-1/2}` loss).
    pub m: usize,
    pub t0: Vec<f64>,
    pub lower_bound_table: Vec<LowerBoundRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_fit: Option<PowerFit>,
    pub decay_fits: BTreeMap<String, GevreyWitness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rhs_table: Vec<RhsRow>,
    /// Named numeric checks such as residuals.
    pub checks: BTreeMap<String, f64>,
    pub tubes: Vec<TubeCertificate>,
}

/// A ladder frequency.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Rung {
    pub xi: BigUint,
    pub ln: f64,
    /// `xi` as a float when it is exact in `f64`.
    pub value: Option<f64>,
}

impl Rung {
    pub fn new(xi: BigUint) -> Self {
        let value = xi.to_u64().filter(|v| *v < (1u64 << 53)).map(|v| v as f64);
        Self { ln: ln_biguint(&xi), xi, value }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.xi.to_i64()
    }
}

#[derive(Debug, Clone)]
pub struct SingularSolution {
    pub certificate: Certificate,
    /// Coefficients on the leading ladder entries.
    pub coefficients: Option<FourierField>,
    /// Every ladder entry is a multiple of `q`.
    pub q: u64,
    factors: Vec<Factor>,
    rungs: Vec<Rung>,
    /// Witness phases `e^{i r_k . t_J}`: the axes and one integer vector per rung.
    phases: Option<(Vec<usize>, Vec<Vec<i64>>)>,
}

impl SingularSolution {
    pub fn construction(&self) -> &[Construction] {
        &self.certificate.construction
    }

    pub fn ladder(&self) -> &[String] {
        &self.certificate.ladder
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// `u^(t, xi)` at any point and any frequency of the ladder form.
    pub fn value(&self, t: &[f64], xi: f64) -> Complex<f64> {
        self.factors.iter().zip(t).map(|(f, t)| f.value(*t, xi)).product()
    }

    /// `(L_j u)^(t, xi)` for the 0-based variable `j`, from the closed form
    /// of each factor. `None` for witness constructions, whose phases are
    /// tied to the ladder index rather than to `xi`.
    pub fn rhs_value(&self, j: usize, t: &[f64], xi: f64) -> Option<Complex<f64>> {
        if self.phases.is_some() || j >= self.factors.len() {
            return None;
        }
        Some(
            self.factors
                .iter()
                .zip(t)
                .enumerate()
                .map(|(k, (f, t))| if k == j { f.rhs(*t, xi) } else { f.value(*t, xi) })
                .product(),
        )
    }

    /// Materialises up to `rows` leading ladder entries on an `nt^n` grid.
    pub fn to_field(&self, nt: usize, rows: usize) -> Result<FourierField, SingularError> {
        match &self.phases {
            None => materialize(&self.factors, &self.rungs, nt, rows, |_, _| Complex::new(1.0, 0.0)),
            Some((axes, r)) => materialize(&self.factors, &self.rungs, nt, rows, |k, t| {
                crate::scalar::cis(axes.iter().zip(&r[k]).map(|(&a, &p)| p as f64 * t[a]).sum::<f64>())
            }),
        }
    }

    /// Power-law fit of the lower-bound table values over a window.
    pub fn power_fit(&self, xi_min: f64, xi_max: f64) -> Result<PowerFit, SingularError> {
        Ok(fit_power_law(&table_points(&self.certificate.lower_bound_table), xi_min, xi_max)?)
    }
}

pub(crate) fn table_points(rows: &[LowerBoundRow]) -> Vec<(f64, f64)> {
    rows.iter().map(|r| (r.ln_xi.exp(), r.value)).collect()
}

/// Tensor product of the factors on the grid, times an extra per-rung,
/// per-point multiplier `extra(rung index, t)`.
pub(crate) fn materialize(
    factors: &[Factor],
    rungs: &[Rung],
    nt: usize,
    rows: usize,
    extra: impl Fn(usize, &[f64]) -> Complex<f64> + Sync,
) -> Result<FourierField, SingularError> {
    use rayon::prelude::*;
    let n = factors.len();
    if n == 0 {
        return Err(SingularError::Invalid("no variables to materialise".into()));
    }
    let grid = uniform_grid::<f64>(nt);
    let mut field = FourierField::zero(n, nt);
    let picked: Vec<(usize, i64, f64)> = rungs
        .iter()
        .enumerate()
        .filter_map(|(k, r)| Some((k, r.as_i64()?, r.value?)))
        .filter(|(_, _, x)| *x <= factor::LAPLACE_SWITCH)
        .take(rows)
        .collect();
    let blocks: Vec<(i64, Vec<Complex<f64>>)> = picked
        .into_par_iter()
        .map(|(k, xi, x)| {
            let tables: Vec<Vec<Complex<f64>>> = factors.iter().map(|f| grid.iter().map(|&t| f.value(t, x)).collect()).collect();
            let len = nt.pow(n as u32);
            let mut t = vec![0.0; n];
            let values = (0..len)
                .map(|mut flat| {
                    let mut z = Complex::new(1.0, 0.0);
                    for d in (0..n).rev() {
                        let i = flat % nt;
                        flat /= nt;
                        z *= tables[d][i];
                        t[d] = grid[i];
                    }
                    z * extra(k, &t)
                })
                .collect();
            (xi, values)
        })
        .collect();
    for (xi, v) in blocks {
        field.insert(xi, v)?;
    }
    Ok(field)
}
