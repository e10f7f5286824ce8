//! Continued fraction expansion with exact convergents and log-scale mirrors.
//!
//! Convention: the digits `a_1, a_2, ...` define
//! `alpha = 1/(a_1 + 1/(a_2 + ...))`, a number in `(0, 1)`, with
//! `p_1 = 1, q_1 = a_1, p_2 = a_2, q_2 = a_2 a_1 + 1` and
//! `p_n = a_n p_{n-1} + p_{n-2}`, `q_n = a_n q_{n-1} + q_{n-2}`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use twofloat::TwoFloat;

use super::digits::{Digit, DigitSpec};
use super::DiophantineError;

/// Convergents whose denominator exceeds this many decimal digits are
/// tracked by logarithm only.
pub const DEFAULT_DIGIT_CAP: usize = 100_000;

/// One convergent `p_n / q_n`.
#[derive(Debug, Clone)]
pub struct Convergent {
    pub index: usize,
    /// Exact numerator, when materialised.
    pub p: Option<BigUint>,
    /// Exact denominator, when materialised.
    pub q: Option<BigUint>,
    pub ln_p: TwoFloat,
    pub ln_q: TwoFloat,
}

impl Convergent {
    pub fn is_exact(&self) -> bool {
        self.p.is_some() && self.q.is_some()
    }

    pub fn ln_q_f64(&self) -> f64 {
        f64::from(self.ln_q)
    }
}

/// Exact bracket `lower < |p_n - alpha q_n| < upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxInterval {
    pub index: usize,
    pub lower: BigRational,
    pub upper: BigRational,
}

/// Logarithmic form of [`ApproxInterval`], available at every index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogInterval {
    pub index: usize,
    pub ln_lower: f64,
    pub ln_upper: f64,
}

/// A digit stream expanded to a fixed number of convergents.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    spec: DigitSpec,
    digit_cap: usize,
    digits: Vec<Digit>,
    convergents: Vec<Convergent>,
}

/// Exact-or-log value used while running the recurrence.
#[derive(Clone)]
struct Term {
    exact: Option<BigUint>,
    ln: TwoFloat,
}

impl Term {
    fn zero() -> Self {
        Self { exact: Some(BigUint::zero()), ln: TwoFloat::from(f64::NEG_INFINITY) }
    }

    fn one() -> Self {
        Self { exact: Some(BigUint::one()), ln: TwoFloat::from(0.0) }
    }

    fn is_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(Zero::is_zero)
    }
}

/// `a * prev + prevprev`, exactly when possible and within the cap.
fn step(a: &Digit, prev: &Term, prevprev: &Term, cap: usize) -> Term {
    if let (Some(a), Some(x), Some(y)) = (a.exact(), &prev.exact, &prevprev.exact) {
        let bits_estimate = a.bits() + x.bits();
        if (bits_estimate as f64) * std::f64::consts::LOG10_2 <= cap as f64 + 1.0 {
            let value = a * x + y;
            let ln = if value.is_zero() {
                TwoFloat::from(f64::NEG_INFINITY)
            } else {
                crate::exact::ln_biguint_dd(&value)
            };
            return Term { exact: Some(value), ln };
        }
    }
    // log(a x + y) = log a + log x + log1p(y / (a x))
    let main = a.ln() + prev.ln;
    let correction = if prevprev.is_zero() {
        0.0
    } else {
        let delta = f64::from(prevprev.ln - main);
        delta.exp().ln_1p()
    };
    Term { exact: None, ln: main + TwoFloat::from(correction) }
}

impl ContinuedFraction {
    /// Expands `count` convergents with the default digit cap.
    pub fn expand(spec: &DigitSpec, count: usize) -> Result<Self, DiophantineError> {
        Self::expand_with_cap(spec, count, DEFAULT_DIGIT_CAP)
    }

    /// Expands `count` convergents; digit `count + 1` is fetched too when the
    /// stream has it, so that error brackets are available at every index.
    pub fn expand_with_cap(spec: &DigitSpec, count: usize, digit_cap: usize) -> Result<Self, DiophantineError> {
        if count == 0 {
            return Err(DiophantineError::InvalidArgument("at least one convergent is required".into()));
        }
        let mut digits = Vec::with_capacity(count + 1);
        for n in 1..=count + 1 {
            match spec.digit(n, digit_cap) {
                Ok(d) => digits.push(d),
                Err(DiophantineError::DigitStreamExhausted { .. }) if n == count + 1 => break,
                Err(e) => return Err(e),
            }
        }
        let mut convergents = Vec::with_capacity(count);
        // (p_{-1}, q_{-1}) = (1, 0), (p_0, q_0) = (0, 1)
        let (mut p2, mut q2) = (Term::one(), Term::zero());
        let (mut p1, mut q1) = (Term::zero(), Term::one());
        for (i, a) in digits.iter().take(count).enumerate() {
            let p = step(a, &p1, &p2, digit_cap);
            let q = step(a, &q1, &q2, digit_cap);
            let exact = p.exact.is_some() && q.exact.is_some();
            convergents.push(Convergent {
                index: i + 1,
                p: if exact { p.exact.clone() } else { None },
                q: if exact { q.exact.clone() } else { None },
                ln_p: p.ln,
                ln_q: q.ln,
            });
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
            if !exact {
                // once exactness is lost it stays lost
                p1.exact = None;
                q1.exact = None;
            }
        }
        Ok(Self { spec: spec.clone(), digit_cap, digits, convergents })
    }

    pub fn spec(&self) -> &DigitSpec {
        &self.spec
    }

    pub fn digit_cap(&self) -> usize {
        self.digit_cap
    }

    /// Number of convergents held.
    pub fn len(&self) -> usize {
        self.convergents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.convergents.is_empty()
    }

    /// Digit `a_n` (1-based).
    pub fn digit(&self, n: usize) -> Result<&Digit, DiophantineError> {
        self.digits
            .get(n.wrapping_sub(1))
            .ok_or(DiophantineError::DigitStreamExhausted { requested: n, available: self.digits.len() })
    }

    /// Convergent `n` (1-based).
    pub fn convergent(&self, n: usize) -> Result<&Convergent, DiophantineError> {
        self.convergents
            .get(n.wrapping_sub(1))
            .ok_or(DiophantineError::DigitStreamExhausted { requested: n, available: self.convergents.len() })
    }

    /// The first `n` convergents.
    pub fn convergents(&self, n: usize) -> Result<&[Convergent], DiophantineError> {
        if n == 0 {
            return Err(DiophantineError::InvalidArgument("n must be at least 1".into()));
        }
        if n > self.convergents.len() {
            return Err(DiophantineError::DigitStreamExhausted { requested: n, available: self.convergents.len() });
        }
        Ok(&self.convergents[..n])
    }

    /// Exact pairs `(p_n, q_n)` for the first `n` convergents.
    pub fn exact_pairs(&self, n: usize) -> Result<Vec<(BigUint, BigUint)>, DiophantineError> {
        self.convergents(n)?
            .iter()
            .map(|c| match (&c.p, &c.q) {
                (Some(p), Some(q)) => Ok((p.clone(), q.clone())),
                _ => Err(DiophantineError::BeyondExactCap { index: c.index, cap: self.digit_cap }),
            })
            .collect()
    }

    /// `ln q_{n}` with the convention `q_0 = 1`.
    pub fn ln_q(&self, n: usize) -> Result<f64, DiophantineError> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok(f64::from(self.convergent(n)?.ln_q))
    }

    /// Exact bracket of `|p_n - alpha q_n|`:
    /// `[1/((a_{n+1}+2) q_n), 1/(a_{n+1} q_n)]`.
    pub fn approx_interval(&self, n: usize) -> Result<ApproxInterval, DiophantineError> {
        let conv = self.convergent(n)?;
        let next = self.digit(n + 1)?;
        let (Some(q), Some(a)) = (&conv.q, next.exact()) else {
            return Err(DiophantineError::BeyondExactCap { index: n, cap: self.digit_cap });
        };
        let q = BigInt::from(q.clone());
        let a = BigInt::from(a.clone());
        let lower = BigRational::new(BigInt::one(), (&a + 2) * &q);
        let upper = BigRational::new(BigInt::one(), a * q);
        Ok(ApproxInterval { index: n, lower, upper })
    }

    /// Log-scale bracket of `|p_n - alpha q_n|`, valid beyond the exact cap.
    pub fn log_interval(&self, n: usize) -> Result<LogInterval, DiophantineError> {
        let conv = self.convergent(n)?;
        let next = self.digit(n + 1)?;
        let ln_a = f64::from(next.ln());
        // ln(a + 2) = ln a + ln1p(2/a)
        let ln_a2 = ln_a + (2.0 * (-ln_a).exp()).ln_1p();
        let ln_q = f64::from(conv.ln_q);
        Ok(LogInterval { index: n, ln_lower: -(ln_a2 + ln_q), ln_upper: -(ln_a + ln_q) })
    }

    /// The convergent `p_n / q_n` as an exact rational.
    pub fn convergent_value(&self, n: usize) -> Result<BigRational, DiophantineError> {
        let conv = self.convergent(n)?;
        match (&conv.p, &conv.q) {
            (Some(p), Some(q)) => Ok(BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()))),
            _ => Err(DiophantineError::BeyondExactCap { index: n, cap: self.digit_cap }),
        }
    }

    /// Value of the truncated fraction `[a_1, ..., a_m]` for the held digits,
    /// evaluated bottom-up in exact arithmetic.
    pub fn truncated_value(&self, m: usize) -> Result<BigRational, DiophantineError> {
        if m == 0 || m > self.digits.len() {
            return Err(DiophantineError::DigitStreamExhausted { requested: m, available: self.digits.len() });
        }
        let mut acc = BigRational::zero();
        for d in self.digits[..m].iter().rev() {
            let a = d.exact().ok_or(DiophantineError::BeyondExactCap { index: m, cap: self.digit_cap })?;
            acc = (BigRational::from_integer(BigInt::from(a.clone())) + acc).recip();
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones() -> DigitSpec {
        DigitSpec::Constant { digit: "1".into() }
    }

    fn pairs(cf: &ContinuedFraction, n: usize) -> Vec<(u64, u64)> {
        cf.exact_pairs(n)
            .unwrap()
            .into_iter()
            .map(|(p, q)| (p.try_into().unwrap(), q.try_into().unwrap()))
            .collect()
    }

    #[test]
    fn fibonacci_convergents() {
        let cf = ContinuedFraction::expand(&ones(), 4).unwrap();
        assert_eq!(pairs(&cf, 4), vec![(1, 1), (1, 2), (2, 3), (3, 5)]);
    }

    #[test]
    fn factorial_convergents() {
        let cf = ContinuedFraction::expand(&DigitSpec::FactorialPow10, 3).unwrap();
        assert_eq!(pairs(&cf, 3), vec![(1, 10), (100, 1001), (100_000_001, 1_001_000_010)]);
    }

    #[test]
    fn single_convergent() {
        let spec = DigitSpec::Explicit { digits: vec!["7".into(), "3".into()] };
        let cf = ContinuedFraction::expand(&spec, 1).unwrap();
        assert_eq!(pairs(&cf, 1), vec![(1, 7)]);
    }

    #[test]
    fn exhausted_stream_is_reported() {
        let spec = DigitSpec::Explicit { digits: vec!["7".into()] };
        assert!(matches!(
            ContinuedFraction::expand(&spec, 3),
            Err(DiophantineError::DigitStreamExhausted { .. })
        ));
    }

    #[test]
    fn approx_interval_examples() {
        let cf = ContinuedFraction::expand(&ones(), 3).unwrap();
        let iv = cf.approx_interval(2).unwrap();
        assert_eq!(iv.lower, BigRational::new(1.into(), 6.into()));
        assert_eq!(iv.upper, BigRational::new(1.into(), 2.into()));

        let spec = DigitSpec::Explicit { digits: vec!["10".into(), "100".into(), "1000000".into()] };
        let cf = ContinuedFraction::expand(&spec, 2).unwrap();
        let iv = cf.approx_interval(2).unwrap();
        assert_eq!(iv.lower, BigRational::new(1.into(), (1001 * 1_000_002u64).into()));
        assert_eq!(iv.upper, BigRational::new(1.into(), (1001 * 1_000_000u64).into()));
        assert!(iv.lower < iv.upper);
    }

    #[test]
    fn log_scale_tracks_exact_logs() {
        let exact = ContinuedFraction::expand(&DigitSpec::FactorialPow10, 8).unwrap();
        let capped = ContinuedFraction::expand_with_cap(&DigitSpec::FactorialPow10, 8, 200).unwrap();
        assert!(capped.convergent(6).unwrap().q.is_none());
        for n in 1..=8 {
            let a = exact.ln_q(n).unwrap();
            let b = capped.ln_q(n).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn truncated_value_matches_convergent() {
        let cf = ContinuedFraction::expand(&ones(), 6).unwrap();
        for n in 1..=6 {
            assert_eq!(cf.truncated_value(n).unwrap(), cf.convergent_value(n).unwrap());
        }
    }
}
