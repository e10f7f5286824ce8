//! Exact rational helpers: parsing, lossy conversion, logarithms of big
//! integers and a small univariate polynomial type with Sturm sequences.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as an exact rational")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, integers, decimals (`"0.125"`) and scientific notation
/// (`"1.5e-3"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Canonical text form `p/q` (or `p` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts a rational of arbitrary size to the nearest `f64` (to within a
/// couple of ulps), saturating to `±inf`/`0` outside the double range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let shift = n.bits() as i64 - d.bits() as i64;
    // Scale so the integer quotient carries ~64 significant bits.
    let scaled = if shift >= 64 {
        n / (d << ((shift - 64) as usize))
    } else {
        (n << ((64 - shift) as usize)) / d
    };
    let q = scaled.to_f64().unwrap_or(f64::INFINITY);
    let e = (shift - 64) as i32;
    sign * q * 2f64.powi(e.clamp(-1100, 1100))
}

/// Natural logarithm of a positive big integer, accurate to double
/// precision relative error regardless of size.
pub fn ln_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "logarithm of zero");
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(f) = n.to_f64() {
            if f.is_finite() {
                return f.ln();
            }
        }
    }
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Double-double natural logarithm of a positive big integer.
pub fn ln_biguint_dd(n: &BigUint) -> twofloat::TwoFloat {
    use twofloat::TwoFloat;
    assert!(!n.is_zero(), "logarithm of zero");
    let bits = n.bits();
    let shift = bits.saturating_sub(100);
    let top = n >> shift;
    // top < 2^100: split into two doubles exactly enough for a TwoFloat.
    let hi_shift = top.bits().saturating_sub(53);
    let hi = (&top >> hi_shift).to_f64().unwrap_or(0.0) * 2f64.powi(hi_shift as i32);
    let lo_int = &top - (BigUint::from((&top >> hi_shift).to_u64().unwrap_or(0)) << hi_shift);
    let lo = lo_int.to_f64().unwrap_or(0.0);
    let mantissa = TwoFloat::new_add(hi, lo);
    mantissa.ln() + twofloat::consts::LN_2 * TwoFloat::from(shift as f64)
}

/// Natural logarithm of a positive rational of arbitrary size.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "logarithm of a non-positive rational");
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Number of decimal digits of a positive integer.
pub fn decimal_len(n: &BigUint) -> usize {
    if n.is_zero() {
        return 1;
    }
    // log10 estimate, corrected exactly.
    let est = ((n.bits() as f64 - 1.0) * std::f64::consts::LOG10_2).floor() as usize + 1;
    let ten = BigUint::from(10u32);
    if *n >= num_traits::pow(ten, est) {
        est + 1
    } else {
        est
    }
}

pub fn rational_abs(r: &BigRational) -> BigRational {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

/// Exact `floor` of a rational.
pub fn rational_floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Least common multiple of the denominators of the given rationals.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Dense univariate polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
                    let b = other.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&(BigRational::one() / l)),
            None => Self::zero(),
        }
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Yun square-free factorisation: returns `(f_1, f_2, ...)` with
    /// `self = c * prod f_i^i`, each `f_i` square-free and pairwise coprime.
    pub fn squarefree_factors(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a = Self::gcd(self, &d);
        let mut b = self.div_rem(&a).0;
        let mut c = d.div_rem(&a).0;
        let mut e = c.add(&b.derivative().scale(&-BigRational::one()));
        loop {
            let f = Self::gcd(&b, &e);
            out.push(f.clone());
            b = b.div_rem(&f).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = e.div_rem(&f).0;
            e = c.add(&b.derivative().scale(&-BigRational::one()));
        }
        out
    }

    /// Number of distinct real roots via a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let Some(deg) = self.degree() else { return 0 };
        if deg == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-BigRational::one()));
        }
        let changes = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let sign_of = |r: &BigRational| -> i8 {
            match r.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            }
        };
        let at_pos_inf: Vec<i8> = seq.iter().map(|p| sign_of(p.leading().unwrap())).collect();
        let at_neg_inf: Vec<i8> = seq
            .iter()
            .map(|p| {
                let s = sign_of(p.leading().unwrap());
                if p.degree().unwrap() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        changes(at_neg_inf) - changes(at_pos_inf)
    }

    /// True iff the polynomial takes both signs on the real line, i.e. has a
    /// real root of odd multiplicity.
    pub fn changes_sign_on_reals(&self) -> bool {
        self.squarefree_factors()
            .iter()
            .enumerate()
            .any(|(i, f)| (i + 1) % 2 == 1 && f.count_real_roots() > 0)
    }
}

impl FromStr for RatPoly {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = s.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }
}
