//! Products of one-variable factors and the constructions with real fields.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::constant::RealConstant;
use crate::diophantine::{scale_witness, ContinuedFraction, LiouvilleWitness, WitnessPair};
use crate::exact::ln_biguint;
use crate::gevrey::{estimate_decay, fit_power_law, DecayOptions};
use crate::solver::apply_operator;
use crate::system::{sign_analysis, SignProfile, SystemSpec};

use super::build::{build_prop51, build_prop52, sized_nt, unit_applies};
use super::factor::Factor;
use super::{
    materialize, table_points, U_FIT_FROM, Certificate, Construction, FactorKind, LowerBoundRow, RhsRow, Rung, SingularError,
    SingularOptions, SingularSolution, TubeCertificate,
};

/// Renames `name_<i>` keys with `map(i)`.
fn renumber<T: Clone>(fits: &BTreeMap<String, T>, map: impl Fn(usize) -> usize) -> BTreeMap<String, T> {
    fits.iter()
        .map(|(k, v)| {
            let key = match k.rsplit_once('_').and_then(|(head, tail)| Some((head, tail.parse::<usize>().ok()?))) {
                Some((head, i)) => format!("{head}_{}", map(i)),
                None => k.clone(),
            };
            (key, v.clone())
        })
        .collect()
}

fn phase_factor(a: &RealConstant) -> Option<Factor> {
    let r = a.as_rational()?;
    Some(Factor::Phase { p: r.numer().to_i64()?, q: r.denom().to_i64()? })
}

/// `u^(t, qk) = prod_j u^_j(t_j, qk)`, `k = 1..=k_max`. Every factor's
/// ladder must contain these frequencies.
pub fn build_product(per_tube: &[SingularSolution], q: u64, k_max: usize, opts: &SingularOptions) -> Result<SingularSolution, SingularError> {
    if q == 0 || k_max == 0 {
        return Err(SingularError::LadderMismatch("q and k_max must be positive".into()));
    }
    let rungs: Vec<Rung> = (1..=k_max as u64).map(|k| Rung::new(BigUint::from(q) * k)).collect();
    let mut index: Vec<Vec<usize>> = Vec::with_capacity(per_tube.len());
    for (c, child) in per_tube.iter().enumerate() {
        let pos: HashMap<&str, usize> = child.ladder().iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();
        let idx = rungs
            .iter()
            .map(|r| {
                let key = r.xi.to_string();
                pos.get(key.as_str()).copied().ok_or_else(|| {
                    SingularError::LadderMismatch(format!("factor {} has no frequency {key}", c + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        index.push(idx);
    }

    let mut tubes = Vec::new();
    let mut factors = Vec::new();
    let mut decay_fits = BTreeMap::new();
    let mut construction = Vec::new();
    for (child, idx) in per_tube.iter().zip(&index) {
        let offset = tubes.len();
        for t in &child.certificate.tubes {
            tubes.push(TubeCertificate {
                tube: offset + t.tube,
                lower: idx.iter().map(|&i| t.lower[i]).collect(),
                ln_lower: idx.iter().map(|&i| t.ln_lower[i]).collect(),
                ..t.clone()
            });
        }
        let fits = renumber(&child.certificate.decay_fits, |i| offset + i);
        for (k, v) in fits {
            let key = if k == "u_t0" { format!("u_t0_{}", offset + 1) } else { k };
            decay_fits.insert(key, v);
        }
        for c in child.construction() {
            if !construction.contains(c) {
                construction.push(*c);
            }
        }
        factors.extend(child.factors.iter().cloned());
    }
    construction.push(Construction::Product);

    let rows: Vec<LowerBoundRow> = rungs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut value = 1.0;
            let mut ln_value = 0.0;
            for (child, idx) in per_tube.iter().zip(&index) {
                let row = &child.certificate.lower_bound_table[idx[k]];
                value *= row.value;
                ln_value += row.ln_value;
            }
            let (mut lower, mut ln_lower) = (1.0, 0.0);
            for t in &tubes {
                lower *= t.lower[k];
                ln_lower += t.ln_lower[k];
            }
            LowerBoundRow { xi: r.xi.to_string(), ln_xi: r.ln, value, ln_value, lower, ln_lower }
        })
        .collect();
    let points = table_points(&rows);
    let from = per_tube.iter().filter_map(|c| c.certificate.checks.get(U_FIT_FROM).copied()).fold(16.0, f64::max);
    let mut checks = BTreeMap::new();
    checks.insert(U_FIT_FROM.to_string(), from);
    if let Ok(w) = estimate_decay(&points, opts.s, &DecayOptions::window(from, f64::INFINITY)) {
        decay_fits.insert("u_t0".into(), w);
    }
    let power_fit = fit_power_law(&points, opts.power_window.0, opts.power_window.1).ok();
    let coefficients = if factors.is_empty() {
        None
    } else {
        Some(materialize(&factors, &rungs, sized_nt(factors.len(), opts.nt), opts.field_rows, |_, _| Complex::new(1.0, 0.0))?)
    };
    let certificate = Certificate {
        construction,
        ladder: rungs.iter().map(|r| r.xi.to_string()).collect(),
        m: per_tube.iter().map(|c| c.certificate.m).sum(),
        t0: per_tube.iter().flat_map(|c| c.certificate.t0.clone()).collect(),
        lower_bound_table: rows,
        power_fit,
        decay_fits,
        rhs_table: Vec::new(),
        checks,
        tubes,
    };
    Ok(SingularSolution { certificate, coefficients, q, factors, rungs, phases: None })
}

/// Indices (0-based) of the tubes with `b = 0` and of the others.
fn split_tubes(spec: &SystemSpec) -> (Vec<usize>, Vec<usize>) {
    (0..spec.n).partition(|&j| sign_analysis(&spec.tubes[j].b).profile == SignProfile::IdenticallyZero)
}

/// Combines the factors of `v` (on the tubes outside `J`) with per-tube
/// factors on `J`.
fn interleave(spec: &SystemSpec, v: &SingularSolution, j_factors: Vec<Factor>) -> (Vec<Factor>, Vec<usize>) {
    let (j_axes, rest) = split_tubes(spec);
    let mut out: Vec<Option<Factor>> = vec![None; spec.n];
    for (j, f) in j_axes.iter().zip(j_factors) {
        out[*j] = Some(f);
    }
    for (j, f) in rest.iter().zip(&v.factors) {
        out[*j] = Some(f.clone());
    }
    (out.into_iter().map(|f| f.expect("every tube filled")).collect(), rest)
}

fn check_v(spec: &SystemSpec, v: &SingularSolution) -> Result<(Vec<usize>, Vec<usize>), SingularError> {
    let (j_axes, rest) = split_tubes(spec);
    if j_axes.is_empty() {
        return Err(SingularError::Invalid("J is empty; use the product construction".into()));
    }
    if v.n() != rest.len() {
        return Err(SingularError::LadderMismatch(format!("v has {} variables, the system {} non-real tubes", v.n(), rest.len())));
    }
    Ok((j_axes, rest))
}

fn remapped_tubes(v: &SingularSolution, rest: &[usize]) -> Vec<TubeCertificate> {
    v.certificate.tubes.iter().map(|t| TubeCertificate { tube: rest[t.tube - 1] + 1, ..t.clone() }).collect()
}

/// Rational averages on `J`: `u^(t, qk) = v^(t'', qk) e^{-i qk a_0' . t'}`.
pub fn build_rational_j(spec: &SystemSpec, v: &SingularSolution, q: u64, opts: &SingularOptions) -> Result<SingularSolution, SingularError> {
    let (j_axes, rest) = check_v(spec, v)?;
    let qb = BigUint::from(q);
    if q == 0 || v.rungs.iter().any(|r| !(&r.xi % &qb).is_zero()) {
        return Err(SingularError::LadderMismatch(format!("ladder of v is not on multiples of q = {q}")));
    }
    let mut j_factors = Vec::with_capacity(j_axes.len());
    let mut max_freq = 0.0f64;
    for &j in &j_axes {
        let a = spec.tubes[j].a.average();
        let r = a.as_rational().ok_or_else(|| SingularError::Invalid(format!("a_{}0 is not rational", j + 1)))?;
        if !(r.clone() * BigInt::from(q)).is_integer() {
            return Err(SingularError::IntegralityError { tube: j + 1 });
        }
        max_freq = max_freq.max(crate::exact::rational_to_f64(&r).abs());
        j_factors.push(phase_factor(&a).ok_or_else(|| SingularError::Invalid(format!("a_{}0 is too large", j + 1)))?);
    }
    let (factors, _) = interleave(spec, v, j_factors);
    let nt = sized_nt(spec.n, opts.nt);
    let resolved: Vec<Rung> = v
        .rungs
        .iter()
        .filter(|r| r.value.is_some_and(|x| x * max_freq < (nt / 2) as f64 - 1.0))
        .cloned()
        .collect();
    let field = materialize(&factors, &resolved, nt, opts.field_rows, |_, _| Complex::new(1.0, 0.0))?;
    let mut checks = v.certificate.checks.clone();
    let scale = field.max_abs().max(f64::MIN_POSITIVE);
    for &j in &j_axes {
        let lu = apply_operator(&spec.tubes[j], j, &field)?;
        checks.insert(format!("residual_L{}", j + 1), lu.max_abs() / scale);
    }
    let rows = v.certificate.lower_bound_table.len();
    let mut tubes = remapped_tubes(v, &rest);
    for &j in &j_axes {
        tubes.push(TubeCertificate {
            tube: j + 1,
            kind: FactorKind::Phase,
            a0: spec.tubes[j].a.average().to_f64(),
            t0: 0.0,
            lower: vec![1.0; rows],
            ln_lower: vec![0.0; rows],
            profile: None,
            delta: None,
            translation: None,
            cutoff: None,
            c_fit: None,
            proof_constant: None,
        });
    }
    tubes.sort_by_key(|t| t.tube);
    let mut construction = v.certificate.construction.clone();
    construction.push(Construction::RationalJ);
    let certificate = Certificate {
        construction,
        t0: factors.iter().map(Factor::t0).collect(),
        decay_fits: renumber(&v.certificate.decay_fits, |i| rest.get(i.wrapping_sub(1)).map_or(i, |r| r + 1)),
        checks,
        tubes,
        ..v.certificate.clone()
    };
    Ok(SingularSolution { certificate, coefficients: Some(field), q, factors, rungs: v.rungs.clone(), phases: None })
}

/// Irrational averages on `J` with an approximation witness `(r_k, s_k)`
/// (already scaled by `q`): `u^(t, s_k) = v^(t'', s_k) e^{i r_k . t'}`.
pub fn build_expliouville_j(
    spec: &SystemSpec,
    witness: &LiouvilleWitness,
    v: &SingularSolution,
    q: u64,
    opts: &SingularOptions,
) -> Result<SingularSolution, SingularError> {
    let (j_axes, rest) = check_v(spec, v)?;
    let mismatch = |m: String| Err(SingularError::WitnessMismatch(m));
    if witness.pairs.is_empty() {
        return mismatch("the witness has no pairs".into());
    }
    if witness.dimension() != Some(j_axes.len()) {
        return mismatch(format!("witness dimension {:?}, J has {} fields", witness.dimension(), j_axes.len()));
    }
    if q == 0 || q % v.q != 0 {
        return mismatch(format!("q = {q} is not a multiple of the ladder step {} of v", v.q));
    }
    let qb = BigUint::from(q);
    if witness.pairs.iter().any(|p| !(&p.s % &qb).is_zero()) {
        return mismatch(format!("witness frequencies are not multiples of q = {q}"));
    }
    let alphas: Vec<RealConstant> = j_axes.iter().map(|&j| spec.tubes[j].a.average()).collect();
    let s = opts.s;
    let checks = witness.verify(&alphas, s)?;
    let ln_amp = ln_biguint(&witness.amplitude()?);
    let rungs: Vec<Rung> = witness.pairs.iter().map(|p| Rung::new(p.s.clone())).collect();
    let ln_sup_v: f64 = v.factors.iter().map(Factor::ln_sup).sum();

    let mut rows = Vec::with_capacity(rungs.len());
    let mut rhs_table = Vec::with_capacity(rungs.len());
    let mut tubes = remapped_tubes(v, &rest);
    for t in &mut tubes {
        t.lower.clear();
        t.ln_lower.clear();
    }
    for (k, r) in rungs.iter().enumerate() {
        let mut ln_value = 0.0;
        for f in &v.factors {
            ln_value += f.ln_abs_at_t0(r.value, r.ln)?;
        }
        let (mut lower, mut ln_lower) = (1.0, 0.0);
        for t in &mut tubes {
            let ll = t.c_fit.map_or(0.0, |c| c.ln() - 0.5 * r.ln);
            t.ln_lower.push(ll);
            t.lower.push(ll.exp());
            lower *= ll.exp();
            ln_lower += ll;
        }
        rows.push(LowerBoundRow { xi: r.xi.to_string(), ln_xi: r.ln, value: ln_value.exp(), ln_value, lower, ln_lower });
        let check = &checks[k];
        let ln_upper = check.ln_upper.unwrap_or(f64::NAN);
        rhs_table.push(RhsRow {
            xi: r.xi.to_string(),
            tube: None,
            ln_sup: ln_upper + ln_sup_v,
            ln_bound: Some(check.ln_bound + ln_sup_v),
            certified: Some(check.certified),
            epsilon_row: check.ln_upper.map(|u| (ln_amp - u) * (-r.ln / s).exp()),
        });
    }
    for &j in &j_axes {
        tubes.push(TubeCertificate {
            tube: j + 1,
            kind: FactorKind::Phase,
            a0: spec.tubes[j].a.average().to_f64(),
            t0: 0.0,
            lower: vec![1.0; rungs.len()],
            ln_lower: vec![0.0; rungs.len()],
            profile: None,
            delta: None,
            translation: None,
            cutoff: None,
            c_fit: None,
            proof_constant: None,
        });
    }
    tubes.sort_by_key(|t| t.tube);

    let (factors, _) = interleave(spec, v, vec![Factor::Phase { p: 0, q: 1 }; j_axes.len()]);
    let r_ints: Option<Vec<Vec<i64>>> = witness.pairs.iter().map(|p| p.r.iter().map(ToPrimitive::to_i64).collect()).collect();
    let nt = sized_nt(spec.n, opts.nt);
    let mut check_map = v.certificate.checks.clone();
    check_map.insert("rows".into(), rows.len() as f64);
    check_map.insert("certified_rows".into(), rhs_table.iter().filter(|r| r.certified == Some(true)).count() as f64);
    let coefficients = match &r_ints {
        Some(r) => {
            let keep: Vec<usize> = (0..rungs.len())
                .filter(|&k| rungs[k].value.is_some_and(|x| x <= 1e6) && r[k].iter().all(|p| p.unsigned_abs() < (nt / 2 - 1) as u64))
                .collect();
            let kept_rungs: Vec<Rung> = keep.iter().map(|&k| rungs[k].clone()).collect();
            let kept_r: Vec<Vec<i64>> = keep.iter().map(|&k| r[k].clone()).collect();
            if kept_rungs.is_empty() {
                None
            } else {
                Some(materialize(&factors, &kept_rungs, nt, opts.field_rows, |k, t| {
                    crate::scalar::cis(j_axes.iter().zip(&kept_r[k]).map(|(&a, &p)| p as f64 * t[a]).sum::<f64>())
                })?)
            }
        }
        None => None,
    };
    let mut construction = v.certificate.construction.clone();
    construction.push(Construction::ExpLiouvilleJ);
    let certificate = Certificate {
        construction,
        ladder: rungs.iter().map(|r| r.xi.to_string()).collect(),
        m: v.certificate.m,
        t0: factors.iter().map(Factor::t0).collect(),
        lower_bound_table: rows,
        power_fit: None,
        decay_fits: renumber(&v.certificate.decay_fits, |i| rest.get(i.wrapping_sub(1)).map_or(i, |r| r + 1)),
        rhs_table,
        checks: check_map,
        tubes,
    };
    Ok(SingularSolution {
        certificate,
        coefficients,
        q,
        factors,
        rungs,
        phases: r_ints.map(|r| (j_axes.clone(), r)),
    })
}

/// Witness `(-p_n, q_n)`, `n = 1..=count`, from the convergents of a
/// continued-fraction constant, with `delta` half the smallest rate the
/// convergent brackets certify at order `s`.
pub fn convergent_witness(alpha: &RealConstant, count: usize, s: f64) -> Result<LiouvilleWitness, SingularError> {
    let RealConstant::Cf(spec) = alpha else {
        return Err(SingularError::WitnessMismatch(format!("{alpha} is not a continued fraction")));
    };
    let cf = ContinuedFraction::expand(spec, count + 1)?;
    let pairs: Vec<WitnessPair> = cf
        .exact_pairs(count)?
        .into_iter()
        .map(|(p, q)| WitnessPair { r: vec![-BigInt::from(p)], s: q })
        .collect();
    let mut delta = f64::INFINITY;
    for n in 1..=count {
        let iv = cf.log_interval(n)?;
        delta = delta.min(-iv.ln_upper * (-cf.ln_q(n)? / s).exp());
    }
    Ok(LiouvilleWitness::new(0.5 * delta, pairs)?)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Chooses and runs the constructions for a normalised system whose
/// non-real fields all change sign.
pub fn build_for_system(spec: &SystemSpec, opts: &SingularOptions, witness: Option<&LiouvilleWitness>) -> Result<SingularSolution, SingularError> {
    spec.validate().map_err(|e| SingularError::Invalid(e.to_string()))?;
    if let Some(j) = spec.tubes.iter().position(|t| !t.a.is_constant()) {
        return Err(SingularError::Invalid(format!("a_{} is not constant; normalise first", j + 1)));
    }
    let (j_axes, rest) = split_tubes(spec);
    let mut q = 1u64;
    let mut units = Vec::new();
    for &j in &rest {
        let tube = &spec.tubes[j];
        let profile = sign_analysis(&tube.b).profile;
        if profile != SignProfile::ChangesSign {
            return Err(SingularError::ProfileError(format!("b_{} has profile {profile:?}; it must change sign", j + 1)));
        }
        let unit = unit_applies(&tube.a.average(), &tube.b);
        if let Some(r) = &unit {
            q = lcm(q, r.denom().to_u64().ok_or_else(|| SingularError::Invalid("denominator too large".into()))?);
        }
        units.push(unit);
    }
    for &j in &j_axes {
        if let Some(r) = spec.tubes[j].a.average().as_rational() {
            q = lcm(q, r.denom().to_u64().ok_or_else(|| SingularError::Invalid("denominator too large".into()))?);
        }
    }
    let any_laplace = units.iter().any(Option::is_none);
    let k_max = if any_laplace { (opts.xi_max / q).max(1) as usize } else { opts.k_max };
    let mut children = Vec::with_capacity(rest.len());
    for (&j, unit) in rest.iter().zip(&units) {
        let tube = &spec.tubes[j];
        let child = match unit {
            Some(r) => {
                let step = r.denom().to_u64().unwrap_or(1);
                build_prop51(r, &tube.b, &SingularOptions { k_max: k_max * (q / step) as usize, ..*opts })?
            }
            None => build_prop52(&tube.a.average(), &tube.b, &SingularOptions { xi_max: q * k_max as u64, ..*opts })?,
        };
        children.push(child);
    }
    let v = build_product(&children, q, k_max, opts)?;
    if j_axes.is_empty() {
        return Ok(v);
    }
    let rational = j_axes.iter().all(|&j| spec.tubes[j].a.average().is_rational() == Some(true));
    if rational {
        return build_rational_j(spec, &v, q, opts);
    }
    let w = match witness {
        Some(w) => w.clone(),
        None if j_axes.len() == 1 => convergent_witness(&spec.tubes[j_axes[0]].a.average(), 4, opts.s)?,
        None => return Err(SingularError::WitnessMismatch("several irrational averages need an explicit vector witness".into())),
    };
    let scaled = scale_witness(&w, &BigUint::from(q), opts.s)?;
    build_expliouville_j(spec, &scaled, &v, q, opts)
}
