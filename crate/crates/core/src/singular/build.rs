//! Single-variable singular solutions.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::constant::RealConstant;
use crate::exact::rational_to_f64;
use crate::gevrey::{estimate_decay, fit_power_law, make_cutoff, DecayOptions, RealTrig};
use crate::solver::apply_operator;
use crate::system::{sign_analysis, Coefficient, SignProfile, Tube};

use super::factor::{Factor, LaplaceFactor};
use super::profile::Frame;
use super::{
    U_FIT_FROM, Certificate, Construction, FactorKind, LowerBoundRow, RhsRow, Rung, SingularError, SingularOptions, SingularSolution,
    TubeCertificate,
};

/// Maximiser of the primitive `B` of a zero-mean `b`.
fn argmax_primitive(b: &RealTrig, primitive: &RealTrig) -> f64 {
    let n = 4096;
    let mut t = (0..n)
        .map(|i| TAU * i as f64 / n as f64)
        .fold((0.0, f64::NEG_INFINITY), |best, t| {
            let v = primitive.eval(t);
            if v > best.1 {
                (t, v)
            } else {
                best
            }
        })
        .0;
    let db = b.to_complex::<f64>().derivative();
    for _ in 0..60 {
        let curv = db.eval(t).re;
        if curv >= 0.0 {
            break;
        }
        let step = -b.eval(t) / curv;
        if step.abs() > 4.0 * TAU / n as f64 || primitive.eval(t + step) < primitive.eval(t) - 1e-15 {
            break;
        }
        t += step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    crate::scalar::wrap_angle(t)
}

fn split_rational(a0: &BigRational) -> Result<(i64, i64), SingularError> {
    match (a0.numer().to_i64(), a0.denom().to_i64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(SingularError::Invalid(format!("average {a0} is too large"))),
    }
}

pub(crate) fn unit_factor(a0: &BigRational, b: &RealTrig) -> Result<Factor, SingularError> {
    if !b.has_zero_mean() {
        return Err(SingularError::MeanNotZero(b.constant()));
    }
    let (p, q) = split_rational(a0)?;
    let primitive = b.integral_from_zero();
    let t0 = if b.is_zero() { 0.0 } else { argmax_primitive(b, &primitive) };
    let b_t0 = primitive.eval(t0);
    Ok(Factor::Unit { p, q, primitive, t0, b_t0 })
}

pub(crate) fn sized_nt(n: usize, nt: usize) -> usize {
    let mut nt = nt.max(4);
    while n > 1 && nt.checked_pow(n as u32).is_none_or(|v| v > 1 << 16) {
        nt /= 2;
    }
    nt
}

/// `u^(t, qk) = e^{-i qk a_0 t} e^{qk (B(t) - B(t_0))}` for `k = 1..=k_max`,
/// solving `L u = 0` with `|u^(t_0, qk)| = 1`.
pub fn build_prop51(a0: &BigRational, b: &RealTrig, opts: &SingularOptions) -> Result<SingularSolution, SingularError> {
    let factor = unit_factor(a0, b)?;
    let q = a0.denom().to_u64().ok_or_else(|| SingularError::Invalid("denominator too large".into()))?;
    let t0 = factor.t0();
    let rungs: Vec<Rung> = (1..=opts.k_max as u64).map(|k| Rung::new(BigUint::from(q * k))).collect();
    let rows: Vec<LowerBoundRow> = rungs
        .iter()
        .map(|r| {
            let value = r.value.map_or(1.0, |x| factor.value(t0, x).norm());
            LowerBoundRow { xi: r.xi.to_string(), ln_xi: r.ln, value, ln_value: value.ln(), lower: 1.0, ln_lower: 0.0 }
        })
        .collect();
    let mut checks = BTreeMap::new();
    checks.insert("unit_defect".to_string(), rows.iter().map(|r| (r.value - 1.0).abs()).fold(0.0, f64::max));
    let factors = vec![factor];
    let field = super::materialize(&factors, &rungs, opts.nt, opts.field_rows, |_, _| num_complex::Complex::new(1.0, 0.0))?;
    let tube = Tube::new(Coefficient::Constant(RealConstant::Exact(a0.clone())), b.clone());
    let scale = field.max_abs().max(f64::MIN_POSITIVE);
    checks.insert("residual_L1".to_string(), apply_operator(&tube, 0, &field)?.max_abs() / scale);
    checks.insert("max_modulus".to_string(), field.max_abs());
    let mut decay_fits = BTreeMap::new();
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.ln_xi.exp(), r.value)).collect();
    if let Ok(w) = estimate_decay(&points, opts.s.max(1.0), &DecayOptions::default()) {
        decay_fits.insert("u_t0".to_string(), w);
    }
    let n_rows = rows.len();
    let certificate = Certificate {
        construction: vec![Construction::Prop51],
        ladder: rungs.iter().map(|r| r.xi.to_string()).collect(),
        m: 0,
        t0: vec![t0],
        power_fit: None,
        lower_bound_table: rows,
        decay_fits,
        rhs_table: Vec::new(),
        checks,
        tubes: vec![TubeCertificate {
            tube: 1,
            kind: FactorKind::Unit,
            a0: rational_to_f64(a0),
            t0,
            lower: vec![1.0; n_rows],
            ln_lower: vec![0.0; n_rows],
            profile: None,
            delta: None,
            translation: None,
            cutoff: None,
            c_fit: None,
            proof_constant: None,
        }],
    };
    Ok(SingularSolution { certificate, coefficients: Some(field), q, factors, rungs, phases: None })
}

pub(crate) fn laplace_factor(a0: &RealConstant, b: &RealTrig, s: f64) -> Result<LaplaceFactor, SingularError> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(SingularError::OrderError(s));
    }
    let profile = sign_analysis(b).profile;
    if profile != SignProfile::ChangesSign {
        return Err(SingularError::ProfileError(format!("b must change sign, profile is {profile:?}")));
    }
    if b.has_zero_mean() && a0.is_rational() == Some(true) {
        return Err(SingularError::Invalid("c_0 is rational; the unit construction applies".into()));
    }
    let mirror = b.constant() > 0.0;
    let frame = Frame::new(a0.to_f64(), b, mirror)?;
    let w0 = frame.centre();
    let delta = 0.5f64.min(w0.min(TAU - w0)) / 2.0;
    let cutoff = make_cutoff(s, (w0 - delta, w0 + delta), (w0 - delta / 2.0, w0 + delta / 2.0))?;
    Ok(LaplaceFactor { frame, cutoff, delta })
}

/// Laplace-type singular solution for `c_0` irrational and `b` changing
/// sign, on the ladder `xi = 1..=xi_max`.
pub fn build_prop52(a0: &RealConstant, b: &RealTrig, opts: &SingularOptions) -> Result<SingularSolution, SingularError> {
    let lf = laplace_factor(a0, b, opts.s)?;
    let rungs: Vec<Rung> = (1..=opts.xi_max).map(|x| Rung::new(BigUint::from(x))).collect();
    let ln_values: Vec<f64> = rungs
        .par_iter()
        .map(|r| lf.ln_abs_at_t0(r.value, r.ln))
        .collect::<Result<_, _>>()?;
    // C = min sqrt(xi) |u^(t_0, xi)| over the table
    let ln_c = rungs.iter().zip(&ln_values).map(|(r, v)| v + 0.5 * r.ln).fold(f64::INFINITY, f64::min);
    let c = ln_c.exp();
    if !(c > 0.0) {
        return Err(SingularError::ProfileError("vanishing coefficients at t_0".into()));
    }
    let ln_lower: Vec<f64> = rungs.iter().map(|r| ln_c - 0.5 * r.ln).collect();
    let lower: Vec<f64> = ln_lower.iter().map(|v| v.exp()).collect();
    let rows: Vec<LowerBoundRow> = rungs
        .iter()
        .zip(&ln_values)
        .zip(ln_lower.iter().zip(&lower))
        .map(|((r, v), (ll, lo))| LowerBoundRow {
            xi: r.xi.to_string(),
            ln_xi: r.ln,
            value: v.exp(),
            ln_value: *v,
            lower: *lo,
            ln_lower: *ll,
        })
        .collect();
    let rhs_table: Vec<RhsRow> = rungs
        .iter()
        .filter_map(|r| Some((r, r.value?)))
        .map(|(r, x)| RhsRow {
            xi: r.xi.to_string(),
            tube: Some(1),
            ln_sup: lf.ln_rhs_sup(x),
            ln_bound: None,
            certified: None,
            epsilon_row: None,
        })
        .collect();

    let mut decay_fits = BTreeMap::new();
    let mut checks = BTreeMap::new();
    let u_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.ln_xi.exp(), r.value)).collect();
    let from = lf.asymptotic_from().clamp(16.0, (opts.xi_max as f64 / 4.0).max(16.0));
    checks.insert(U_FIT_FROM.to_string(), from);
    if let Ok(w) = estimate_decay(&u_points, opts.s, &DecayOptions::window(from, f64::INFINITY)) {
        decay_fits.insert("u_t0".to_string(), w);
    }
    let f_points: Vec<(f64, f64)> = rhs_table.iter().map(|r| (r.xi.parse::<f64>().unwrap_or(0.0), r.ln_sup.exp())).collect();
    if let Ok(w) = estimate_decay(&f_points, opts.s, &DecayOptions::default()) {
        decay_fits.insert("f_1".to_string(), w);
    }
    let power_fit = fit_power_law(&u_points, opts.power_window.0, opts.power_window.1).ok();

    let proof_a = lf.proof_a();
    let tube = TubeCertificate {
        tube: 1,
        kind: FactorKind::Laplace,
        a0: a0.to_f64(),
        t0: lf.frame.from_work(lf.frame.t0),
        lower,
        ln_lower,
        profile: Some(lf.frame.profile()),
        delta: Some(lf.delta),
        translation: Some(lf.frame.shift),
        cutoff: Some(lf.cutoff),
        c_fit: Some(c),
        proof_constant: (proof_a > 0.0).then(|| (std::f64::consts::PI / proof_a).sqrt()),
    };
    let t0 = tube.t0;
    let factors = vec![Factor::Laplace(Box::new(lf))];
    let field = super::materialize(&factors, &rungs, opts.nt, opts.field_rows, |_, _| num_complex::Complex::new(1.0, 0.0))?;
    checks.insert("max_modulus".to_string(), field.max_abs());
    let certificate = Certificate {
        construction: vec![Construction::Prop52],
        ladder: rungs.iter().map(|r| r.xi.to_string()).collect(),
        m: 1,
        t0: vec![t0],
        lower_bound_table: rows,
        power_fit,
        decay_fits,
        rhs_table,
        checks,
        tubes: vec![tube],
    };
    Ok(SingularSolution { certificate, coefficients: Some(field), q: 1, factors, rungs, phases: None })
}

/// The average as a rational when the unit construction applies: `b` has
/// zero mean and `a` is an exact rational.
pub(crate) fn unit_applies(a: &RealConstant, b: &RealTrig) -> Option<BigRational> {
    if b.has_zero_mean() {
        a.as_rational()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::DigitSpec;
    use crate::exact::parse_rational;

    fn sin() -> RealTrig {
        RealTrig::from_strs("0", &[], &["1"]).unwrap()
    }

    #[test]
    fn prop51_sine() {
        for a0 in ["0", "1/2"] {
            let a = parse_rational(a0).unwrap();
            let sol = build_prop51(&a, &sin(), &SingularOptions::default()).unwrap();
            let c = &sol.certificate;
            assert!((c.t0[0] - std::f64::consts::PI).abs() < 1e-12);
            assert!(c.checks["unit_defect"] <= 1e-14, "{:?}", c.checks);
            assert!(c.checks["residual_L1"] <= 1e-11, "{:?}", c.checks);
            assert!(c.checks["max_modulus"] <= 1.0 + 1e-14);
            assert_eq!(c.ladder.len(), 64);
        }
        let sol = build_prop51(&parse_rational("0").unwrap(), &sin(), &SingularOptions::default()).unwrap();
        assert!((sol.value(&[0.0], 3.0).norm() - (-6.0f64).exp()).abs() < 1e-15);
        let shifted = RealTrig::from_strs("1", &[], &["1"]).unwrap();
        assert!(matches!(build_prop51(&parse_rational("0").unwrap(), &shifted, &SingularOptions::default()), Err(SingularError::MeanNotZero(_))));
    }

    #[test]
    fn prop52_dichotomy() {
        let a0 = RealConstant::Cf(DigitSpec::Constant { digit: "2".into() });
        let sol = build_prop52(&a0, &sin(), &SingularOptions::default()).unwrap();
        let c = &sol.certificate;
        let p = c.power_fit.unwrap();
        assert!((-0.6..=-0.4).contains(&p.exponent) && p.r2 >= 0.98, "{p:?}");
        assert!(c.decay_fits["u_t0"].epsilon <= 1e-3, "{:?}", c.decay_fits["u_t0"]);
        let f = &c.decay_fits["f_1"];
        assert!(f.epsilon >= 0.1 && f.fit_r2 >= 0.99, "{f:?}");
        assert!(c.lower_bound_table.iter().all(|r| r.value >= r.lower * (1.0 - 1e-12)));
        assert!(c.tubes[0].c_fit.unwrap() > 0.0);
        assert!((c.tubes[0].profile.unwrap().b0 - 2.0).abs() < 1e-12);
        assert!(matches!(
            build_prop52(&a0, &sin(), &SingularOptions { s: 1.0, ..Default::default() }),
            Err(SingularError::OrderError(_))
        ));
    }
}
