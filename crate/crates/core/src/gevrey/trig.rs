//! Trigonometric polynomials.
//!
//! [`RealTrig`] is the user-facing real polynomial
//! `c_0 + sum_k (cos_k cos kt + sin_k sin kt)`, carried exactly when every
//! coefficient was given as a rational string. [`TrigPoly`] is the complex
//! exponential form `sum_eta c_eta e^{i eta t}` used by the numerics.

use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::constant::RealConstant;
use crate::exact::{format_rational, parse_rational, rational_to_f64};
use crate::scalar::Real;

use super::GevreyError;

/// Coefficients below this magnitude make a float polynomial count as zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-14;

/// Exact coefficient lists of a real trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTrig {
    pub c0: BigRational,
    /// `cos[k]` multiplies `cos((k+1) t)`.
    pub cos: Vec<BigRational>,
    /// `sin[k]` multiplies `sin((k+1) t)`.
    pub sin: Vec<BigRational>,
}

/// Real trigonometric polynomial with optional exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTrig {
    c0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    exact: Option<ExactTrig>,
}

impl RealTrig {
    pub fn zero() -> Self {
        Self::from_exact(ExactTrig { c0: BigRational::zero(), cos: vec![], sin: vec![] })
    }

    pub fn from_exact(exact: ExactTrig) -> Self {
        let conv = |v: &[BigRational]| v.iter().map(rational_to_f64).collect::<Vec<_>>();
        let mut p = Self { c0: rational_to_f64(&exact.c0), cos: conv(&exact.cos), sin: conv(&exact.sin), exact: Some(exact) };
        p.trim();
        p
    }

    pub fn from_floats(c0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let mut p = Self { c0, cos, sin, exact: None };
        p.trim();
        p
    }

    /// Parses exact coefficients from rational strings.
    pub fn from_strs(c0: &str, cos: &[&str], sin: &[&str]) -> Result<Self, GevreyError> {
        let parse = |t: &str| parse_rational(t).map_err(|e| GevreyError::Malformed(e.to_string()));
        Ok(Self::from_exact(ExactTrig {
            c0: parse(c0)?,
            cos: cos.iter().map(|t| parse(t)).collect::<Result<_, _>>()?,
            sin: sin.iter().map(|t| parse(t)).collect::<Result<_, _>>()?,
        }))
    }

    fn trim(&mut self) {
        let trim_exact = |v: &mut Vec<BigRational>| {
            while v.last().is_some_and(Zero::is_zero) {
                v.pop();
            }
        };
        if let Some(e) = &mut self.exact {
            trim_exact(&mut e.cos);
            trim_exact(&mut e.sin);
            self.cos.truncate(e.cos.len());
            self.sin.truncate(e.sin.len());
        } else {
            while self.cos.last() == Some(&0.0) {
                self.cos.pop();
            }
            while self.sin.last() == Some(&0.0) {
                self.sin.pop();
            }
        }
    }

    pub fn exact(&self) -> Option<&ExactTrig> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn constant(&self) -> f64 {
        self.c0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Mean value over a period, exact when the coefficients are.
    pub fn mean(&self) -> RealConstant {
        match &self.exact {
            Some(e) => RealConstant::Exact(e.c0.clone()),
            None => RealConstant::Float(self.c0),
        }
    }

    /// `true` when all coefficients vanish (exactly, or below
    /// [`FLOAT_ZERO_TOL`] for float input).
    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(e) => e.c0.is_zero() && e.cos.is_empty() && e.sin.is_empty(),
            None => self.c0.abs() < FLOAT_ZERO_TOL && self.cos.iter().chain(&self.sin).all(|c| c.abs() < FLOAT_ZERO_TOL),
        }
    }

    /// `true` when the polynomial is a constant.
    pub fn is_constant(&self) -> bool {
        match &self.exact {
            Some(e) => e.cos.is_empty() && e.sin.is_empty(),
            None => self.cos.iter().chain(&self.sin).all(|c| c.abs() < FLOAT_ZERO_TOL),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.c0;
        for (k, c) in self.cos.iter().enumerate() {
            acc += c * ((k + 1) as f64 * t).cos();
        }
        for (k, c) in self.sin.iter().enumerate() {
            acc += c * ((k + 1) as f64 * t).sin();
        }
        acc
    }

    /// Lipschitz constant `sum_k k (|cos_k| + |sin_k|)`.
    pub fn lipschitz(&self) -> f64 {
        let pad = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0).abs();
        (0..self.degree()).map(|k| (k + 1) as f64 * (pad(&self.cos, k) + pad(&self.sin, k))).sum()
    }

    /// The same polynomial with the mean removed.
    pub fn without_mean(&self) -> Self {
        match &self.exact {
            Some(e) => Self::from_exact(ExactTrig { c0: BigRational::zero(), ..e.clone() }),
            None => Self::from_floats(0.0, self.cos.clone(), self.sin.clone()),
        }
    }

    /// `int_0^t (p - mean)`, i.e. `sum (sin_k/k)(1 - cos kt) + (cos_k/k) sin kt`.
    pub fn integral_from_zero(&self) -> Self {
        match &self.exact {
            Some(e) => {
                let k = |i: usize| BigRational::from_integer((i as i64 + 1).into());
                let c0 = e.sin.iter().enumerate().fold(BigRational::zero(), |acc, (i, b)| acc + b / k(i));
                let cos = e.sin.iter().enumerate().map(|(i, b)| -(b / k(i))).collect();
                let sin = e.cos.iter().enumerate().map(|(i, a)| a / k(i)).collect();
                Self::from_exact(ExactTrig { c0, cos, sin })
            }
            None => {
                let k = |i: usize| (i + 1) as f64;
                let c0 = self.sin.iter().enumerate().map(|(i, b)| b / k(i)).sum();
                let cos = self.sin.iter().enumerate().map(|(i, b)| -b / k(i)).collect();
                let sin = self.cos.iter().enumerate().map(|(i, a)| a / k(i)).collect();
                Self::from_floats(c0, cos, sin)
            }
        }
    }

    /// `-p`.
    pub fn negated(&self) -> Self {
        match &self.exact {
            Some(e) => Self::from_exact(ExactTrig {
                c0: -e.c0.clone(),
                cos: e.cos.iter().map(|c| -c.clone()).collect(),
                sin: e.sin.iter().map(|c| -c.clone()).collect(),
            }),
            None => Self::from_floats(-self.c0, self.cos.iter().map(|c| -c).collect(), self.sin.iter().map(|c| -c).collect()),
        }
    }

    /// `t -> -p(-t)`.
    pub fn reflected(&self) -> Self {
        match &self.exact {
            Some(e) => Self::from_exact(ExactTrig {
                c0: -e.c0.clone(),
                cos: e.cos.iter().map(|c| -c.clone()).collect(),
                sin: e.sin.clone(),
            }),
            None => Self::from_floats(-self.c0, self.cos.iter().map(|c| -c).collect(), self.sin.clone()),
        }
    }

    /// `t -> p(t - shift)` (float result).
    pub fn shifted(&self, shift: f64) -> Self {
        let d = self.degree();
        let mut cos = vec![0.0; d];
        let mut sin = vec![0.0; d];
        for k in 0..d {
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            let (s, c) = ((k + 1) as f64 * shift).sin_cos();
            // a cos(k(t-h)) + b sin(k(t-h))
            cos[k] = a * c - b * s;
            sin[k] = a * s + b * c;
        }
        Self::from_floats(self.c0, cos, sin)
    }

    /// Exponential form.
    pub fn to_complex<T: Real>(&self) -> TrigPoly<T> {
        let d = self.degree();
        let mut c = vec![Complex::new(T::zero(), T::zero()); 2 * d + 1];
        c[d] = Complex::new(T::lit(self.c0), T::zero());
        for k in 1..=d {
            let a = self.cos.get(k - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            // a cos + b sin = (a - ib)/2 e^{ikt} + (a + ib)/2 e^{-ikt}
            c[d + k] = Complex::new(T::lit(a / 2.0), T::lit(-b / 2.0));
            c[d - k] = Complex::new(T::lit(a / 2.0), T::lit(b / 2.0));
        }
        TrigPoly { degree: d, coeffs: c }
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        match &self.exact {
            Some(e) => {
                let strs = |v: &[BigRational]| Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect());
                map.insert("const".into(), Value::String(format_rational(&e.c0)));
                if !e.cos.is_empty() {
                    map.insert("cos".into(), strs(&e.cos));
                }
                if !e.sin.is_empty() {
                    map.insert("sin".into(), strs(&e.sin));
                }
            }
            None => {
                map.insert("const".into(), serde_json::json!(self.c0));
                if !self.cos.is_empty() {
                    map.insert("cos".into(), serde_json::json!(self.cos));
                }
                if !self.sin.is_empty() {
                    map.insert("sin".into(), serde_json::json!(self.sin));
                }
            }
        }
        Value::Object(map)
    }

    /// Parses `{"const": .., "cos": [..], "sin": [..]}` or `{"zero": true}`.
    /// Strings are read as exact rationals, JSON numbers as floats.
    pub fn from_json(value: &Value) -> Result<Self, GevreyError> {
        let bad = |m: String| GevreyError::Malformed(m);
        let map = value.as_object().ok_or_else(|| bad(format!("expected an object, got {value}")))?;
        for key in map.keys() {
            if !matches!(key.as_str(), "const" | "cos" | "sin" | "zero") {
                return Err(bad(format!("unknown key `{key}`")));
            }
        }
        if let Some(z) = map.get("zero") {
            if z.as_bool() != Some(true) || map.len() != 1 {
                return Err(bad("`zero` must be `true` and stand alone".into()));
            }
            return Ok(Self::zero());
        }
        enum Entry {
            Exact(BigRational),
            Float(f64),
        }
        let entry = |v: &Value| -> Result<Entry, GevreyError> {
            match v {
                Value::String(s) => parse_rational(s).map(Entry::Exact).map_err(|e| bad(e.to_string())),
                Value::Number(n) => n.as_f64().map(Entry::Float).ok_or_else(|| bad(n.to_string())),
                other => Err(bad(format!("bad coefficient {other}"))),
            }
        };
        let list = |key: &str| -> Result<Vec<Entry>, GevreyError> {
            match map.get(key) {
                None => Ok(vec![]),
                Some(Value::Array(items)) => items.iter().map(entry).collect(),
                Some(other) => Err(bad(format!("`{key}` must be an array, got {other}"))),
            }
        };
        let c0 = match map.get("const") {
            None => Entry::Exact(BigRational::zero()),
            Some(v) => entry(v)?,
        };
        let cos = list("cos")?;
        let sin = list("sin")?;
        let all_exact = std::iter::once(&c0).chain(&cos).chain(&sin).all(|e| matches!(e, Entry::Exact(_)));
        if all_exact {
            let ex = |e: Entry| match e {
                Entry::Exact(r) => r,
                Entry::Float(_) => unreachable!(),
            };
            Ok(Self::from_exact(ExactTrig {
                c0: ex(c0),
                cos: cos.into_iter().map(ex).collect(),
                sin: sin.into_iter().map(ex).collect(),
            }))
        } else {
            let fl = |e: &Entry| match e {
                Entry::Exact(r) => rational_to_f64(r),
                Entry::Float(x) => *x,
            };
            Ok(Self::from_floats(fl(&c0), cos.iter().map(fl).collect(), sin.iter().map(fl).collect()))
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        std::iter::once(&self.c0).chain(&self.cos).chain(&self.sin).fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `true` when the mean is exactly zero (or below tolerance for floats).
    pub fn has_zero_mean(&self) -> bool {
        match &self.exact {
            Some(e) => e.c0.is_zero(),
            None => self.c0.abs() < FLOAT_ZERO_TOL * self.max_coeff().max(1.0),
        }
    }

    /// Sign of the mean when it is certain.
    pub fn mean_sign(&self) -> Option<std::cmp::Ordering> {
        match &self.exact {
            Some(e) => Some(if e.c0.is_positive() {
                std::cmp::Ordering::Greater
            } else if e.c0.is_negative() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            }),
            None => self.c0.partial_cmp(&0.0),
        }
    }
}

impl fmt::Display for RealTrig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl Serialize for RealTrig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealTrig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        RealTrig::from_json(&value).map_err(serde::de::Error::custom)
    }
}

/// Complex trigonometric polynomial `sum_{|eta| <= degree} c_eta e^{i eta t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<T: Real> {
    degree: usize,
    /// `coeffs[degree + eta]` holds `c_eta`.
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zero() -> Self {
        Self { degree: 0, coeffs: vec![Complex::new(T::zero(), T::zero())] }
    }

    /// Builds from `(eta, c_eta)` pairs; repeated frequencies add up.
    pub fn from_modes(modes: &[(i64, Complex<T>)]) -> Self {
        let degree = modes.iter().map(|(e, _)| e.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 2 * degree + 1];
        for &(eta, c) in modes {
            coeffs[(degree as i64 + eta) as usize] += c;
        }
        Self { degree, coeffs }
    }

    /// Interpolates samples on the uniform `n`-point grid; the Nyquist mode
    /// of an even grid is split symmetrically.
    pub fn from_samples(samples: &[Complex<T>]) -> Self {
        let n = samples.len();
        let c = crate::spectral::forward(samples);
        let half = n / 2;
        let mut modes = Vec::with_capacity(n + 1);
        for (k, z) in c.iter().enumerate() {
            let eta = crate::spectral::freq_of(k, n);
            if n % 2 == 0 && k == half {
                let h = *z * T::lit(0.5);
                modes.push((half as i64, h));
                modes.push((-(half as i64), h));
            } else {
                modes.push((eta, *z));
            }
        }
        Self::from_modes(&modes)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, eta: i64) -> Complex<T> {
        if eta.unsigned_abs() as usize > self.degree {
            return Complex::new(T::zero(), T::zero());
        }
        self.coeffs[(self.degree as i64 + eta) as usize]
    }

    /// `(eta, c_eta)` for every stored frequency.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - self.degree as i64, *c))
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        // e^{i eta t} by repeated multiplication from e^{-i d t}
        let step = crate::scalar::cis(t);
        let mut w = crate::scalar::cis(-t * T::from_usize_lossy(self.degree));
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in &self.coeffs {
            acc += *c * w;
            w *= step;
        }
        acc
    }

    /// Values on the uniform `n`-point grid.
    pub fn sample(&self, n: usize) -> Vec<Complex<T>> {
        if 2 * self.degree < n {
            let mut c = vec![Complex::new(T::zero(), T::zero()); n];
            for (eta, z) in self.modes() {
                c[eta.rem_euclid(n as i64) as usize] += z;
            }
            crate::spectral::inverse(&c)
        } else {
            crate::scalar::uniform_grid::<T>(n).into_iter().map(|t| self.eval(t)).collect()
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .modes()
            .map(|(eta, c)| c * Complex::new(T::zero(), T::from_i64_lossy(eta)))
            .collect();
        Self { degree: self.degree, coeffs }
    }

    /// Zero-mean antiderivative; the dropped mean is returned as well.
    pub fn antiderivative(&self) -> (Self, Complex<T>) {
        let mean = self.coeff(0);
        let coeffs = self
            .modes()
            .map(|(eta, c)| if eta == 0 { Complex::new(T::zero(), T::zero()) } else { c / Complex::new(T::zero(), T::from_i64_lossy(eta)) })
            .collect();
        (Self { degree: self.degree, coeffs }, mean)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| *c * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        let modes: Vec<_> = (-(d as i64)..=d as i64).map(|e| (e, self.coeff(e) + other.coeff(e))).collect();
        Self::from_modes(&modes)
    }

    /// `t -> p(t - shift)`.
    pub fn shifted(&self, shift: T) -> Self {
        let coeffs = self.modes().map(|(eta, c)| c * crate::scalar::cis(-T::from_i64_lossy(eta) * shift)).collect();
        Self { degree: self.degree, coeffs }
    }

    /// `max |c_eta - conj(c_{-eta})|`; zero for real-valued polynomials.
    pub fn realness_defect(&self) -> T {
        self.modes().fold(T::zero(), |m, (eta, c)| m.max((c - self.coeff(-eta).conj()).norm()))
    }

    pub fn max_coeff(&self) -> T {
        crate::scalar::max_abs(&self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn json_round_trip_and_meaning() {
        let json = serde_json::json!({"const": "1/2", "cos": ["0", "1/3"], "sin": ["1"]});
        let p = RealTrig::from_json(&json).unwrap();
        assert!(p.is_exact());
        assert_eq!(p.to_json(), json);
        let t = 0.7;
        assert!((p.eval(t) - (0.5 + (2.0 * t).cos() / 3.0 + t.sin())).abs() < 1e-15);
        let z = RealTrig::from_json(&serde_json::json!({"zero": true})).unwrap();
        assert!(z.is_zero());
        let f = RealTrig::from_json(&serde_json::json!({"sin": [1e-15]})).unwrap();
        assert!(!f.is_exact() && f.is_zero());
        assert!(RealTrig::from_json(&serde_json::json!({"tan": ["1"]})).is_err());
    }

    #[test]
    fn integral_from_zero_matches_calculus() {
        let p = RealTrig::from_strs("1/2", &["0", "1"], &["1"]).unwrap();
        let a = p.integral_from_zero();
        assert!(a.is_exact());
        for &t in &[0.0, 1.0, 2.5] {
            let expect = (1.0 - f64::cos(t)) + (2.0 * t).sin() / 2.0;
            assert!((a.eval(t) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_and_shift() {
        let p = RealTrig::from_strs("1/4", &["1"], &["2"]).unwrap();
        let r = p.reflected();
        let s = p.shifted(0.3);
        for &t in &[0.1, 1.3, 4.0] {
            assert!((r.eval(t) + p.eval(-t)).abs() < 1e-14);
            assert!((s.eval(t) - p.eval(t - 0.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_form_agrees() {
        let p = RealTrig::from_strs("1/2", &["0", "1/3"], &["1"]).unwrap();
        let c: TrigPoly<f64> = p.to_complex();
        assert!(c.realness_defect() < 1e-16);
        for &t in &[0.0, 1.0, PI, 5.0] {
            assert!((c.eval(t).re - p.eval(t)).abs() < 1e-14);
            assert!(c.eval(t).im.abs() < 1e-14);
        }
        let samples = c.sample(16);
        let back = TrigPoly::from_samples(&samples);
        for eta in -2..=2 {
            assert!((back.coeff(eta) - c.coeff(eta)).norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let modes: Vec<(i64, Complex<f64>)> = (-32..=32).map(|e| (e, Complex::new(1.0 / (1.0 + (e * e) as f64), 0.3 / (1.0 + e.abs() as f64).powi(3)))).collect();
        let p = TrigPoly::from_modes(&modes);
        let d = p.derivative();
        let h = 1e-5;
        for &t in &[0.2, 1.7, 3.9] {
            let fd = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
            assert!((fd - d.eval(t)).norm() < 1e-7, "{}", (fd - d.eval(t)).norm());
        }
    }
}
