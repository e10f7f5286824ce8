//! The integral formulas for one field with a sign-definite imaginary part.
//!
//! With `c(t) = a0 + i b(t)` and `H(t, tau) = a0 tau + i int_{t-tau}^t b`,
//! the periodic solution of `u' + i xi c u = f` is
//!
//! ```text
//! u(t) = (1 - e^{-2 pi i xi c0})^{-1} int_0^{2 pi} e^{-i xi H(t, tau)} f(t - tau) dtau
//!      = (e^{2 pi i xi c0} - 1)^{-1} int_0^{2 pi} e^{i xi H~(t, tau)} f(t + tau) dtau
//! ```
//!
//! and the form whose exponential stays bounded by one is used. Writing
//! `f(t - tau) = sum_eta f_eta e^{i eta t} e^{-i eta tau}` separates the
//! integral into kernels `K(t, eta)`, computed once per `xi` and reused for
//! every line of the other variables.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::FourierField;
use crate::gevrey::RealTrig;
use crate::quadrature::{composite, PANEL_ORDER};
use crate::scalar::{cis, uniform_grid};
use crate::spectral::{along_axis, freq_of};
use crate::system::{sign_analysis, SignProfile, SystemSpec};

use super::SolverError;

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSolveOptions {
    /// Lower bound on the number of quadrature nodes in `tau`.
    pub min_nodes: usize,
    /// Nodes per unit of `|xi|`.
    pub nodes_per_xi: usize,
    /// Relative size of a `t_j`-mean at `xi = 0` treated as zero.
    pub mean_tol: f64,
}

impl Default for TubeSolveOptions {
    fn default() -> Self {
        Self { min_nodes: 1024, nodes_per_xi: 4, mean_tol: 1e-10 }
    }
}

impl TubeSolveOptions {
    pub fn nodes(&self, xi: i64) -> usize {
        self.min_nodes.max(self.nodes_per_xi * xi.unsigned_abs() as usize)
    }
}

/// Closed-form evaluator of `H` and `H~` for `a0 + i b(t)`.
#[derive(Debug, Clone)]
pub struct LaplaceKernel {
    pub a0: f64,
    pub b0: f64,
    /// `int_0^t (b - b0)`.
    primitive: RealTrig,
}

impl LaplaceKernel {
    pub fn new(a0: f64, b: &RealTrig) -> Self {
        Self { a0, b0: b.constant(), primitive: b.integral_from_zero() }
    }

    pub fn c0(&self) -> Complex<f64> {
        Complex::new(self.a0, self.b0)
    }

    /// `int_{t - tau}^{t} b`.
    pub fn integral_back(&self, t: f64, tau: f64) -> f64 {
        self.b0 * tau + self.primitive.eval(t) - self.primitive.eval(t - tau)
    }

    /// `int_{t}^{t + tau} b`.
    pub fn integral_forward(&self, t: f64, tau: f64) -> f64 {
        self.b0 * tau + self.primitive.eval(t + tau) - self.primitive.eval(t)
    }

    pub fn h(&self, t: f64, tau: f64) -> Complex<f64> {
        Complex::new(self.a0 * tau, self.integral_back(t, tau))
    }

    pub fn h_tilde(&self, t: f64, tau: f64) -> Complex<f64> {
        Complex::new(self.a0 * tau, self.integral_forward(t, tau))
    }
}

/// `(1 - e^{-2 pi i xi c0})^{-1}` (`backward`) or `(e^{2 pi i xi c0} - 1)^{-1}`.
pub fn prefactor(xi: f64, c0: Complex<f64>, backward: bool) -> Complex<f64> {
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    if backward {
        one / (one - (-i * TAU * xi * c0).exp())
    } else {
        one / ((i * TAU * xi * c0).exp() - one)
    }
}

/// Solves `L_j u = f` for tube `j` (0-based) of a normalised spec.
pub fn solve_single_tube(j: usize, spec: &SystemSpec, f: &FourierField, opts: &TubeSolveOptions) -> Result<FourierField, SolverError> {
    let tube = spec.tubes.get(j).ok_or_else(|| SolverError::Invalid(format!("no tube {j}")))?;
    if f.n() != spec.n {
        return Err(crate::field::FieldError::GridMismatch(format!("field has n = {}, system n = {}", f.n(), spec.n)).into());
    }
    if !tube.a.is_constant() {
        return Err(SolverError::NotNormalized(j));
    }
    let profile = sign_analysis(&tube.b).profile;
    let sign = match profile {
        SignProfile::NonPositiveNotZero => -1.0,
        SignProfile::NonNegativeNotZero => 1.0,
        other => return Err(SolverError::Profile(format!("b_{} has profile {other:?}; the formulas need a fixed sign", j + 1))),
    };
    let kernel = LaplaceKernel::new(tube.a.eval(0.0), &tube.b);
    let blocks: Vec<(i64, Vec<Complex<f64>>)> = f.modes().map(|(xi, v)| (xi, v.to_vec())).collect();
    let solved: Result<Vec<(i64, Vec<Complex<f64>>)>, SolverError> = blocks
        .into_par_iter()
        .map(|(xi, values)| {
            let out = if xi == 0 {
                zero_mode(&values, f, j, opts.mean_tol)?
            } else {
                let backward = (xi as f64) * sign < 0.0;
                solve_block(&values, f, j, xi, &kernel, backward, opts.nodes(xi))
            };
            Ok((xi, out))
        })
        .collect();
    let mut u = FourierField::zero(f.n(), f.nt());
    for (xi, v) in solved? {
        u.insert(xi, v)?;
    }
    Ok(u)
}

fn zero_mode(values: &[Complex<f64>], f: &FourierField, axis: usize, tol: f64) -> Result<Vec<Complex<f64>>, SolverError> {
    let nt = f.nt();
    let shape = f.shape();
    let mut c = values.to_vec();
    along_axis(&mut c, &shape, axis, false);
    let stride = nt.pow((f.n() - axis - 1) as u32);
    let scale = crate::scalar::max_abs(values).max(1.0);
    let mut worst: f64 = 0.0;
    for (flat, z) in c.iter_mut().enumerate() {
        let k = (flat / stride) % nt;
        let eta = freq_of(k, nt);
        if eta == 0 {
            worst = worst.max(z.norm());
            *z = Complex::new(0.0, 0.0);
        } else if nt % 2 == 0 && k == nt / 2 {
            *z = Complex::new(0.0, 0.0);
        } else {
            *z /= Complex::new(0.0, eta as f64);
        }
    }
    if worst > tol * scale {
        return Err(SolverError::Solvability(format!(
            "the xi = 0 data has t_{}-mean of size {worst:e}; d/dt_{} u = f has no periodic solution",
            axis + 1,
            axis + 1
        )));
    }
    along_axis(&mut c, &shape, axis, true);
    Ok(c)
}

fn solve_block(
    values: &[Complex<f64>],
    f: &FourierField,
    axis: usize,
    xi: i64,
    kernel: &LaplaceKernel,
    backward: bool,
    nodes: usize,
) -> Vec<Complex<f64>> {
    let nt = f.nt();
    let xf = xi as f64;
    let grid = uniform_grid::<f64>(nt);
    let rule = composite(0.0, TAU, nodes.div_ceil(PANEL_ORDER));
    let etas: Vec<f64> = (0..nt).map(|k| freq_of(k, nt) as f64).collect();
    let dir = if backward { -1.0 } else { 1.0 };

    // twiddles e^{dir i eta tau_m}, shared by every t
    let twiddle: Vec<Vec<Complex<f64>>> = rule.iter().map(|(tau, _)| etas.iter().map(|e| cis(dir * e * tau)).collect()).collect();

    // G[a][k] = e^{i eta_k t_a} K(t_a, eta_k)
    let g: Vec<Vec<Complex<f64>>> = grid
        .iter()
        .map(|&t| {
            let mut k_row = vec![Complex::new(0.0, 0.0); nt];
            for ((tau, w), tw) in rule.iter().zip(&twiddle) {
                let e = if backward {
                    // e^{-i xi H} = e^{-i xi a0 tau} e^{xi int_{t-tau}^t b}
                    Complex::from_polar((xf * kernel.integral_back(t, *tau)).exp(), -xf * kernel.a0 * tau)
                } else {
                    // e^{i xi H~} = e^{i xi a0 tau} e^{-xi int_t^{t+tau} b}
                    Complex::from_polar((-xf * kernel.integral_forward(t, *tau)).exp(), xf * kernel.a0 * tau)
                };
                let e = e * *w;
                for (acc, z) in k_row.iter_mut().zip(tw) {
                    *acc += e * z;
                }
            }
            k_row.iter().zip(&etas).map(|(kv, eta)| kv * cis(eta * t)).collect()
        })
        .collect();

    let pref = prefactor(xf, kernel.c0(), backward);
    let shape = f.shape();
    let mut c = values.to_vec();
    along_axis(&mut c, &shape, axis, false);
    let stride = nt.pow((f.n() - axis - 1) as u32);
    let outer = c.len() / (nt * stride);
    let mut out = vec![Complex::new(0.0, 0.0); c.len()];
    let mut line = vec![Complex::new(0.0, 0.0); nt];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * nt * stride + i;
            for (k, z) in line.iter_mut().enumerate() {
                *z = c[base + k * stride];
            }
            for (a, row) in g.iter().enumerate() {
                let s: Complex<f64> = row.iter().zip(&line).map(|(gk, ck)| gk * ck).sum();
                out[base + a * stride] = pref * s;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constant::RealConstant;
    use crate::solver::{apply_operator, residual};
    use crate::system::{Coefficient, Order, Tube};

    fn spec(a: RealConstant, b: RealTrig) -> SystemSpec {
        SystemSpec::new(Order::Gevrey(2.0), vec![Tube::new(Coefficient::Constant(a), b)])
    }

    fn field(xi: i64, eta: f64) -> FourierField {
        FourierField::from_fn(1, 32, [xi], |_, t| cis(eta * t[0]))
    }

    #[test]
    fn constant_coefficients() {
        // L u = u_t - i u_x: e^{ix} is mapped to itself
        let s = spec(RealConstant::zero(), RealTrig::from_strs("-1", &[], &[]).unwrap());
        let u = solve_single_tube(0, &s, &field(1, 0.0), &TubeSolveOptions::default()).unwrap();
        assert!(u.sub(&field(1, 0.0)).unwrap().max_abs() < 1e-13);

        // a = 1, b = -1, f = (1 + 2i) e^{i(t + x)}
        let s = spec(RealConstant::from_ratio(1, 1), RealTrig::from_strs("-1", &[], &[]).unwrap());
        let f = field(1, 1.0).map_blocks(|_, v| v.iter().map(|z| z * Complex::new(1.0, 2.0)).collect());
        let u = solve_single_tube(0, &s, &f, &TubeSolveOptions::default()).unwrap();
        assert!(u.sub(&field(1, 1.0)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn touching_profile_manufactured() {
        let b = RealTrig::from_strs("-1/2", &["-1/2"], &[]).unwrap();
        let s = spec(RealConstant::from_ratio(1, 3), b);
        let u = FourierField::from_fn(1, 32, [3, -3], |xi, t| cis(2.0 * t[0] * xi.signum() as f64));
        let f = apply_operator(&s.tubes[0], 0, &u).unwrap();
        let opts = TubeSolveOptions { min_nodes: 2048, ..Default::default() };
        let got = solve_single_tube(0, &s, &f, &opts).unwrap();
        assert!(residual(&s, &got, &[f]).unwrap()[0] < 1e-8);
        assert!(got.sub(&u).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn mirror_sign_and_zero_mode() {
        let b = RealTrig::from_strs("1", &["1/2"], &["1/4"]).unwrap();
        let s = spec(RealConstant::from_ratio(-2, 5), b);
        let u = FourierField::from_fn(1, 32, [-4, 0, 5], |xi, t| cis(xi as f64 * 0.1 + t[0]) + cis(-3.0 * t[0]) * 0.5);
        let f = apply_operator(&s.tubes[0], 0, &u).unwrap();
        let got = solve_single_tube(0, &s, &f, &TubeSolveOptions::default()).unwrap();
        assert!(got.sub(&u).unwrap().max_abs() < 1e-10);

        let bad = FourierField::from_fn(1, 32, [0], |_, _| Complex::new(1.0, 0.0));
        assert!(matches!(solve_single_tube(0, &s, &bad, &TubeSolveOptions::default()), Err(SolverError::Solvability(_))));
    }

    #[test]
    fn rejects_sign_change_and_non_normal_form() {
        let s = spec(RealConstant::zero(), RealTrig::from_strs("0", &[], &["1"]).unwrap());
        assert!(matches!(solve_single_tube(0, &s, &field(1, 0.0), &TubeSolveOptions::default()), Err(SolverError::Profile(_))));
        let mut s = spec(RealConstant::zero(), RealTrig::from_strs("-1", &[], &[]).unwrap());
        s.tubes[0].a = Coefficient::Trig(RealTrig::from_strs("0", &["1"], &[]).unwrap());
        assert!(matches!(solve_single_tube(0, &s, &field(1, 0.0), &TubeSolveOptions::default()), Err(SolverError::NotNormalized(0))));
    }

    #[test]
    fn prefactor_bound() {
        for (a0, b0) in [(0.3, -0.2), (std::f64::consts::SQRT_2, -1e-2), (0.5, -1.0)] {
            let c0 = Complex::new(a0, b0);
            let bound = 1.0 / (1.0 - (TAU * b0).exp());
            for xi in (1..=100_000).step_by(7) {
                assert!(prefactor(xi as f64, c0, true).norm() <= bound * (1.0 + 1e-12));
            }
        }
    }
}
