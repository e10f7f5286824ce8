//! Explicit approximation sequences `(r_k, s_k)` with
//! `max_j |r_k^{(j)} + s_k alpha_j| <= amplitude * exp(-delta s_k^{1/s})`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cf::ContinuedFraction;
use super::DiophantineError;
use crate::constant::RealConstant;
use crate::exact::{ln_biguint, ln_rational};

/// Decimal digits beyond which an enclosure-based check is abandoned.
const MAX_ENCLOSURE_DIGITS: f64 = 20_000.0;

/// One approximation pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct WitnessPair {
    pub r: Vec<BigInt>,
    pub s: BigUint,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    r: Vec<String>,
    s: String,
}

impl TryFrom<RawPair> for WitnessPair {
    type Error = String;

    fn try_from(raw: RawPair) -> Result<Self, Self::Error> {
        let r = raw
            .r
            .iter()
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| format!("bad integer `{t}`")))
            .collect::<Result<_, _>>()?;
        let s = raw.s.trim().parse::<BigUint>().map_err(|_| format!("bad integer `{}`", raw.s))?;
        Ok(Self { r, s })
    }
}

impl From<WitnessPair> for RawPair {
    fn from(p: WitnessPair) -> Self {
        RawPair { r: p.r.iter().map(ToString::to_string).collect(), s: p.s.to_string() }
    }
}

fn default_amplitude() -> String {
    "1".into()
}

/// Approximation witness for a real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleWitness {
    pub delta: f64,
    /// Prefactor of the bound; `1` for a plain witness, `q` after scaling.
    #[serde(default = "default_amplitude")]
    pub amplitude: String,
    pub pairs: Vec<WitnessPair>,
}

/// Result of checking one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub k: usize,
    /// Upper bound on `ln max_j |r_j + s alpha_j|`, when one was obtained.
    pub ln_upper: Option<f64>,
    /// `ln(amplitude) - delta s^{1/s}`.
    pub ln_bound: f64,
    pub certified: bool,
    /// `convergent`, `enclosure` or `unverifiable`.
    pub method: String,
}

impl LiouvilleWitness {
    pub fn new(delta: f64, pairs: Vec<WitnessPair>) -> Result<Self, DiophantineError> {
        let w = Self { delta, amplitude: "1".into(), pairs };
        w.validate()?;
        Ok(w)
    }

    pub fn amplitude(&self) -> Result<BigUint, DiophantineError> {
        self.amplitude
            .trim()
            .parse::<BigUint>()
            .ok()
            .filter(|a| !a.is_zero())
            .ok_or_else(|| DiophantineError::MalformedWitness(format!("bad amplitude `{}`", self.amplitude)))
    }

    /// Dimension of the witnessed vector, when there is at least one pair.
    pub fn dimension(&self) -> Option<usize> {
        self.pairs.first().map(|p| p.r.len())
    }

    pub fn validate(&self) -> Result<(), DiophantineError> {
        let bad = |m: &str| Err(DiophantineError::MalformedWitness(m.to_string()));
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta must be positive");
        }
        self.amplitude()?;
        let dim = self.dimension().unwrap_or(0);
        for (k, pair) in self.pairs.iter().enumerate() {
            if pair.s.is_zero() {
                return bad("s_k must be positive");
            }
            if pair.r.len() != dim || dim == 0 {
                return bad("every r_k must have the same non-zero length");
            }
            if k > 0 && pair.s <= self.pairs[k - 1].s {
                return bad("s_k must be strictly increasing");
            }
        }
        Ok(())
    }

    /// `ln(amplitude) - delta s_k^{1/s}` for pair `k`.
    pub fn ln_bound(&self, k: usize, s: f64) -> Result<f64, DiophantineError> {
        let pair = self.pairs.get(k).ok_or_else(|| DiophantineError::MalformedWitness("no such pair".into()))?;
        Ok(ln_biguint(&self.amplitude()?) - self.delta * (ln_biguint(&pair.s) / s).exp())
    }

    /// Checks every pair against the constants `alphas`.
    ///
    /// For continued-fraction components a pair that is a multiple of a
    /// convergent is bounded by the exact convergent bracket; otherwise an
    /// exact enclosure of the constant is used.
    pub fn verify(&self, alphas: &[RealConstant], s: f64) -> Result<Vec<WitnessCheck>, DiophantineError> {
        self.validate()?;
        if self.dimension().is_some_and(|d| d != alphas.len()) {
            return Err(DiophantineError::MalformedWitness(format!(
                "witness has dimension {:?}, vector has {}",
                self.dimension(),
                alphas.len()
            )));
        }
        let mut checks = Vec::with_capacity(self.pairs.len());
        for (k, pair) in self.pairs.iter().enumerate() {
            let ln_bound = self.ln_bound(k, s)?;
            let mut ln_upper: Option<f64> = Some(f64::NEG_INFINITY);
            let mut method = "convergent";
            for (r, alpha) in pair.r.iter().zip(alphas) {
                let bound = match convergent_bound(r, &pair.s, alpha) {
                    Some(b) => Some(b),
                    None => {
                        method = if method == "unverifiable" { method } else { "enclosure" };
                        enclosure_bound(r, &pair.s, alpha, ln_bound)
                    }
                };
                match bound {
                    Some(b) => ln_upper = ln_upper.map(|u| u.max(b)),
                    None => {
                        ln_upper = None;
                        method = "unverifiable";
                    }
                }
            }
            let certified = ln_upper.is_some_and(|u| u <= ln_bound);
            checks.push(WitnessCheck { k, ln_upper, ln_bound, certified, method: method.into() });
        }
        Ok(checks)
    }
}

/// `ln |r + s alpha|` bounded through a convergent, when `(r, s)` is
/// `c (-p_n, q_n)`.
fn convergent_bound(r: &BigInt, s: &BigUint, alpha: &RealConstant) -> Option<f64> {
    let RealConstant::Cf(spec) = alpha else { return None };
    if !spec.is_infinite() || r.is_positive() {
        return None;
    }
    let p_target = r.magnitude();
    let ln_s = ln_biguint(s);
    let mut count = 8;
    while count <= 4096 {
        let cf = ContinuedFraction::expand(spec, count).ok()?;
        for n in 1..=count {
            let conv = cf.convergent(n).ok()?;
            let (Some(p), Some(q)) = (&conv.p, &conv.q) else { return None };
            if conv.ln_q_f64() > ln_s + 1e-9 {
                return None;
            }
            if (s % q).is_zero() {
                let c = s / q;
                if &(&c * p) == p_target {
                    let iv = cf.log_interval(n).ok()?;
                    return Some(ln_biguint(&c) + iv.ln_upper);
                }
            }
        }
        count *= 2;
    }
    None
}

/// `ln |r + s alpha|` from an exact enclosure with enough digits to resolve
/// `exp(ln_bound)`.
fn enclosure_bound(r: &BigInt, s: &BigUint, alpha: &RealConstant, ln_bound: f64) -> Option<f64> {
    let digits = ((-ln_bound).max(0.0) + ln_biguint(s) + 40.0) / std::f64::consts::LN_10;
    if digits > MAX_ENCLOSURE_DIGITS {
        return None;
    }
    let enc = alpha.enclose(digits.ceil() as u32).ok()?;
    let s = BigRational::from_integer(BigInt::from(s.clone()));
    let center = BigRational::from_integer(r.clone()) + &s * &enc.center;
    let upper = center.abs() + s * enc.radius;
    if upper.is_zero() {
        return Some(f64::NEG_INFINITY);
    }
    Some(ln_rational(&upper))
}

/// Scales a witness by `q`: pairs become `(q r_k, q s_k)`, the amplitude is
/// multiplied by `q` and `delta` becomes `delta / q^{1/s}`.
pub fn scale_witness(w: &LiouvilleWitness, q: &BigUint, s: f64) -> Result<LiouvilleWitness, DiophantineError> {
    w.validate()?;
    if q.is_zero() {
        return Err(DiophantineError::InvalidArgument("q must be at least 1".into()));
    }
    if !(s >= 1.0 && s.is_finite()) {
        return Err(DiophantineError::InvalidArgument(format!("order s must be >= 1, got {s}")));
    }
    if q.is_one() {
        return Ok(w.clone());
    }
    let qi = BigInt::from(q.clone());
    let pairs = w
        .pairs
        .iter()
        .map(|p| WitnessPair { r: p.r.iter().map(|x| x * &qi).collect(), s: &p.s * q })
        .collect();
    Ok(LiouvilleWitness {
        delta: w.delta / (ln_biguint(q) / s).exp(),
        amplitude: (w.amplitude()? * q).to_string(),
        pairs,
    })
}
