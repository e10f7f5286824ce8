//! Finite-horizon trend scores for Liouville and exponential-Liouville
//! behaviour of a continued fraction.
//!
//! All scores are computed from logarithms so they stay finite far past the
//! point where `q_n` can be materialised.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cf::ContinuedFraction;
use super::digits::DigitSpec;
use super::DiophantineError;

/// Convergents examined when classifying a constant inside a system.
pub const DEFAULT_HORIZON: usize = 64;

/// Liouville exponent above which a strictly increasing tail counts as a
/// Liouville trend.
const LIOUVILLE_FLOOR: f64 = 4.0;
/// Exponents that stay at or below this value over the tail count as a
/// bounded (non-Liouville) trend.
const BOUNDED_CEILING: f64 = 3.0;
const NOT_EXP_CEILING: f64 = 1e-3;
const EXP_FLOOR: f64 = 0.1;
const TAIL: usize = 3;

/// Outcome of a finite-horizon classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerdictKind {
    Rational,
    LiouvilleTrend,
    NotLiouvilleTrend,
    NotExpLiouvilleTrend(f64),
    ExpLiouvilleTrend(f64),
    Unknown,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Rational => f.write_str("Rational"),
            VerdictKind::LiouvilleTrend => f.write_str("LiouvilleTrend"),
            VerdictKind::NotLiouvilleTrend => f.write_str("NotLiouvilleTrend"),
            VerdictKind::NotExpLiouvilleTrend(s) => write!(f, "NotExpLiouvilleTrend({s})"),
            VerdictKind::ExpLiouvilleTrend(s) => write!(f, "ExpLiouvilleTrend({s})"),
            VerdictKind::Unknown => f.write_str("Unknown"),
        }
    }
}

impl FromStr for VerdictKind {
    type Err = DiophantineError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || DiophantineError::InvalidArgument(format!("unknown verdict `{text}`"));
        let with_order = |prefix: &str| -> Option<Result<f64, DiophantineError>> {
            let inner = text.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(inner.trim().parse::<f64>().map_err(|_| bad()))
        };
        match text {
            "Rational" => Ok(VerdictKind::Rational),
            "LiouvilleTrend" => Ok(VerdictKind::LiouvilleTrend),
            "NotLiouvilleTrend" => Ok(VerdictKind::NotLiouvilleTrend),
            "Unknown" => Ok(VerdictKind::Unknown),
            _ => {
                if let Some(s) = with_order("NotExpLiouvilleTrend") {
                    Ok(VerdictKind::NotExpLiouvilleTrend(s?))
                } else if let Some(s) = with_order("ExpLiouvilleTrend") {
                    Ok(VerdictKind::ExpLiouvilleTrend(s?))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for VerdictKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VerdictKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One row of the score table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub n: usize,
    pub ln_q: f64,
    /// `ln(a_{n+1} q_n^2) / ln q_n`; absent while `q_n = 1`.
    pub mu: Option<f64>,
    /// `ln(a_{n+1} q_n) / q_n^{1/s}`.
    pub beta: Option<f64>,
    /// `ln((a_{n+1}+2) q_n) / q_n^{1/s}`, the score from the lower bracket.
    pub beta_lower: Option<f64>,
}

/// Classification of a single real number from its continued fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineVerdict {
    pub kinds: Vec<VerdictKind>,
    pub evidence: Vec<EvidenceRow>,
    pub n_used: usize,
    pub s: Option<f64>,
}

impl DiophantineVerdict {
    pub fn rational(n_used: usize) -> Self {
        Self { kinds: vec![VerdictKind::Rational], evidence: Vec::new(), n_used, s: None }
    }

    pub fn unknown() -> Self {
        Self { kinds: vec![VerdictKind::Unknown], evidence: Vec::new(), n_used: 0, s: None }
    }

    pub fn has(&self, kind: VerdictKind) -> bool {
        self.kinds.contains(&kind)
    }

    pub fn is_rational(&self) -> bool {
        self.has(VerdictKind::Rational)
    }

    pub fn is_unknown(&self) -> bool {
        self.kinds.iter().all(|k| *k == VerdictKind::Unknown)
    }

    /// Whether a not-exp-Liouville trend at order `s` was observed.
    pub fn not_exp_liouville(&self, s: f64) -> bool {
        self.kinds.iter().any(|k| matches!(k, VerdictKind::NotExpLiouvilleTrend(t) if *t == s))
    }

    pub fn exp_liouville(&self, s: f64) -> bool {
        self.kinds.iter().any(|k| matches!(k, VerdictKind::ExpLiouvilleTrend(t) if *t == s))
    }

    /// Comma separated kinds, e.g. `LiouvilleTrend, NotExpLiouvilleTrend(2)`.
    pub fn summary(&self) -> String {
        self.kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn check_horizon(cf: &ContinuedFraction, n_max: usize) -> Result<(), DiophantineError> {
    // the score at n needs digit a_{n+1}
    cf.digit(n_max + 1).map(|_| ())?;
    cf.convergent(n_max).map(|_| ())
}

/// `(n, mu_n)` for `n = 2..=n_max`, `mu_n = ln(a_{n+1} q_n^2) / ln q_n`.
pub fn liouville_exponent_trend(cf: &ContinuedFraction, n_max: usize) -> Result<Vec<(usize, f64)>, DiophantineError> {
    if n_max < 2 {
        return Err(DiophantineError::InvalidArgument("n_max must be at least 2".into()));
    }
    check_horizon(cf, n_max)?;
    (2..=n_max)
        .map(|n| {
            let ln_q = cf.ln_q(n)?;
            let ln_a = f64::from(cf.digit(n + 1)?.ln());
            Ok((n, (ln_a + 2.0 * ln_q) / ln_q))
        })
        .collect()
}

/// `exp(ln(ln x) - ln_q / s)`: `ln x / q^{1/s}` without forming `q^{1/s}`.
fn scaled_log(ln_x: f64, ln_q: f64, s: f64) -> f64 {
    (ln_x.ln() - ln_q / s).exp()
}

fn check_order(s: f64) -> Result<(), DiophantineError> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(DiophantineError::InvalidArgument(format!("order s must be >= 1, got {s}")));
    }
    Ok(())
}

/// `(n, beta_n)` for `n = 1..=n_max`, `beta_n = ln(a_{n+1} q_n) / q_n^{1/s}`.
pub fn exp_liouville_score(cf: &ContinuedFraction, s: f64, n_max: usize) -> Result<Vec<(usize, f64)>, DiophantineError> {
    check_order(s)?;
    if n_max < 1 {
        return Err(DiophantineError::InvalidArgument("n_max must be at least 1".into()));
    }
    check_horizon(cf, n_max)?;
    (1..=n_max)
        .map(|n| {
            let iv = cf.log_interval(n)?;
            let ln_q = cf.ln_q(n)?;
            Ok((n, scaled_log(-iv.ln_upper, ln_q, s)))
        })
        .collect()
}

/// One row of a condition-B check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionBRow {
    pub n: usize,
    /// `ln((a_{n+1}+2) q_n)`, minus the log of the certified lower bound.
    pub lhs: f64,
    /// `epsilon q_{n-1}^{1/s}`.
    pub rhs: f64,
    /// `true` certifies `|p_n - alpha q_n| >= exp(-epsilon q_{n-1}^{1/s})`.
    pub certified: bool,
}

/// Checks `|p_n - alpha q_n| >= exp(-epsilon q_{n-1}^{1/s})` for
/// `n = start..=n_max` from the exact lower bracket, with `q_0 = 1`.
///
/// A `true` row is a proof; a `false` row is inconclusive because only the
/// lower bracket is used.
pub fn condition_b_check(
    cf: &ContinuedFraction,
    s: f64,
    epsilon: f64,
    start: usize,
    n_max: usize,
) -> Result<Vec<ConditionBRow>, DiophantineError> {
    check_order(s)?;
    if !(epsilon > 0.0) {
        return Err(DiophantineError::InvalidArgument("epsilon must be positive".into()));
    }
    if start == 0 || start > n_max {
        return Err(DiophantineError::InvalidArgument("need 1 <= N <= n_max".into()));
    }
    check_horizon(cf, n_max)?;
    (start..=n_max)
        .map(|n| {
            let lhs = -cf.log_interval(n)?.ln_lower;
            let ln_rhs = epsilon.ln() + cf.ln_q(n - 1)? / s;
            // compare in log space with a relative guard against round-off
            let certified = lhs.ln() <= ln_rhs - 1e-12 * ln_rhs.abs().max(1.0);
            Ok(ConditionBRow { n, lhs, rhs: ln_rhs.exp(), certified })
        })
        .collect()
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// Classifies the number defined by `spec` over `n_max` convergents.
///
/// A finite explicit stream is rational. Otherwise the tail of the score
/// table decides: the exponent trend gives `LiouvilleTrend` or
/// `NotLiouvilleTrend`, and, when `s` is given, the exponential score gives
/// `NotExpLiouvilleTrend(s)` or `ExpLiouvilleTrend(s)`. The not-exp test uses
/// the score built from the lower bracket, which dominates the true score.
pub fn classify(spec: &DigitSpec, s: Option<f64>, n_max: usize) -> Result<DiophantineVerdict, DiophantineError> {
    if let Some(len) = spec.len() {
        spec.validate()?;
        return Ok(DiophantineVerdict::rational(len));
    }
    if let Some(s) = s {
        check_order(s)?;
    }
    if n_max < TAIL {
        let mut v = DiophantineVerdict::unknown();
        v.s = s;
        return Ok(v);
    }
    let cf = ContinuedFraction::expand(spec, n_max)?;
    check_horizon(&cf, n_max)?;
    let mut evidence = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let iv = cf.log_interval(n)?;
        let ln_q = cf.ln_q(n)?;
        let ln_a = -iv.ln_upper - ln_q;
        let mu = (ln_q > 0.0).then(|| (ln_a + 2.0 * ln_q) / ln_q);
        let beta = s.map(|s| scaled_log(-iv.ln_upper, ln_q, s));
        let beta_lower = s.map(|s| scaled_log(-iv.ln_lower, ln_q, s));
        evidence.push(EvidenceRow { n, ln_q, mu, beta, beta_lower });
    }
    let tail = &evidence[evidence.len() - TAIL..];
    let mut kinds = Vec::new();

    let mus: Option<Vec<f64>> = tail.iter().map(|r| r.mu).collect();
    if let Some(mus) = mus {
        let last = mus[TAIL - 1];
        if strictly_increasing(&mus) && last >= LIOUVILLE_FLOOR {
            kinds.push(VerdictKind::LiouvilleTrend);
        } else if mus.iter().all(|&m| m <= BOUNDED_CEILING) {
            kinds.push(VerdictKind::NotLiouvilleTrend);
        }
    }
    if let Some(s) = s {
        // the trend is read off ln(beta), which stays finite after beta
        // itself underflows
        let ln_lower: Vec<f64> = tail
            .iter()
            .map(|r| cf.log_interval(r.n).map(|iv| (-iv.ln_lower).ln() - r.ln_q / s))
            .collect::<Result<_, _>>()?;
        let upper: Vec<f64> = tail.iter().filter_map(|r| r.beta).collect();
        if strictly_decreasing(&ln_lower) && ln_lower[TAIL - 1] < NOT_EXP_CEILING.ln() {
            kinds.push(VerdictKind::NotExpLiouvilleTrend(s));
        } else if upper.iter().all(|&b| b >= EXP_FLOOR) {
            kinds.push(VerdictKind::ExpLiouvilleTrend(s));
        }
    }
    if kinds.is_empty() {
        kinds.push(VerdictKind::Unknown);
    }
    Ok(DiophantineVerdict { kinds, evidence, n_used: n_max, s })
}
