//! Tagged real constants: exact rationals, continued-fraction defined
//! numbers and plain floats.
//!
//! JSON forms: `"1/2"` (or any rational string), `{"cf": "factorial_pow10"}`
//! (shorthand or full digit-stream object), `{"float": 0.41}` and
//! `{"opaque": "description"}`. A bare JSON number is read as a float.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diophantine::{classify, ContinuedFraction, DigitSpec, DiophantineError, DiophantineVerdict};
use crate::exact::{format_rational, parse_rational, rational_to_f64};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConstantError {
    #[error("malformed constant: {0}")]
    Malformed(String),
    #[error("a float constant carries no exact information")]
    NotExact,
    #[error("could not reach {digits} digits of precision")]
    PrecisionUnreachable { digits: u32 },
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
}

/// A real number together with what is known about it exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum RealConstant {
    Exact(BigRational),
    /// `1/(a_1 + 1/(a_2 + ...))`.
    Cf(DigitSpec),
    Float(f64),
    /// A number known only by description (e.g. one whose existence is
    /// proved non-constructively). Nothing about it can be computed.
    Opaque(String),
}

/// Exact enclosure `|x - center| <= radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub center: BigRational,
    pub radius: BigRational,
}

impl RealConstant {
    pub fn zero() -> Self {
        RealConstant::Exact(BigRational::zero())
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        RealConstant::Exact(BigRational::new(p.into(), q.into()))
    }

    /// `Some(true)` for rationals, `Some(false)` for infinite continued
    /// fractions, `None` for floats.
    pub fn is_rational(&self) -> Option<bool> {
        match self {
            RealConstant::Exact(_) => Some(true),
            RealConstant::Cf(spec) => Some(!spec.is_infinite()),
            RealConstant::Float(_) | RealConstant::Opaque(_) => None,
        }
    }

    /// The exact value when the constant is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            RealConstant::Exact(r) => Some(r.clone()),
            RealConstant::Cf(spec) if !spec.is_infinite() => {
                let n = spec.len().unwrap_or(0);
                if n == 0 {
                    return Some(BigRational::zero());
                }
                ContinuedFraction::expand(spec, n).ok()?.truncated_value(n).ok()
            }
            _ => None,
        }
    }

    /// `true` when the value is exactly zero.
    pub fn is_exact_zero(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_zero())
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        match self {
            RealConstant::Exact(r) => rational_to_f64(r),
            RealConstant::Float(x) => *x,
            RealConstant::Opaque(_) => f64::NAN,
            RealConstant::Cf(_) => match self.enclose(20) {
                Ok(e) => rational_to_f64(&e.center),
                Err(_) => f64::NAN,
            },
        }
    }

    /// Exact rational enclosure of width below `10^{-digits}`.
    pub fn enclose(&self, digits: u32) -> Result<Enclosure, ConstantError> {
        match self {
            RealConstant::Exact(r) => Ok(Enclosure { center: r.clone(), radius: BigRational::zero() }),
            RealConstant::Float(_) | RealConstant::Opaque(_) => Err(ConstantError::NotExact),
            RealConstant::Cf(spec) => {
                if let Some(r) = self.as_rational() {
                    return Ok(Enclosure { center: r, radius: BigRational::zero() });
                }
                let target = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10u32), digits as usize));
                let mut count = 8;
                while count <= 1 << 16 {
                    let cf = ContinuedFraction::expand(spec, count)?;
                    for n in 1..count {
                        // |alpha - p_n/q_n| < 1/(a_{n+1} q_n^2)
                        let Ok(iv) = cf.approx_interval(n) else {
                            return Err(ConstantError::PrecisionUnreachable { digits });
                        };
                        let center = cf.convergent_value(n)?;
                        let radius = iv.upper / BigRational::from_integer(center.denom().clone());
                        if radius < target {
                            return Ok(Enclosure { center, radius });
                        }
                    }
                    count *= 2;
                }
                Err(ConstantError::PrecisionUnreachable { digits })
            }
        }
    }

    /// Diophantine classification at order `s` (if given).
    pub fn classify(&self, s: Option<f64>, horizon: usize) -> Result<DiophantineVerdict, ConstantError> {
        match self {
            RealConstant::Exact(_) => Ok(DiophantineVerdict::rational(0)),
            RealConstant::Float(_) | RealConstant::Opaque(_) => {
                let mut v = DiophantineVerdict::unknown();
                v.s = s;
                Ok(v)
            }
            RealConstant::Cf(spec) => Ok(classify(spec, s, horizon)?),
        }
    }

    /// Parses the JSON forms listed in the module docs.
    pub fn from_json(value: &Value) -> Result<Self, ConstantError> {
        match value {
            Value::String(s) => parse_rational(s)
                .map(RealConstant::Exact)
                .map_err(|e| ConstantError::Malformed(e.to_string())),
            Value::Number(n) => n.as_f64().map(RealConstant::Float).ok_or_else(|| ConstantError::Malformed(n.to_string())),
            Value::Object(map) if map.len() == 1 => {
                if let Some(cf) = map.get("cf") {
                    let spec = match cf {
                        Value::String(s) => s.parse::<DigitSpec>()?,
                        other => {
                            let spec: DigitSpec = serde_json::from_value(other.clone())
                                .map_err(|e| ConstantError::Malformed(e.to_string()))?;
                            spec.validate()?;
                            spec
                        }
                    };
                    Ok(RealConstant::Cf(spec))
                } else if let Some(text) = map.get("opaque") {
                    text.as_str()
                        .map(|t| RealConstant::Opaque(t.to_string()))
                        .ok_or_else(|| ConstantError::Malformed(text.to_string()))
                } else if let Some(x) = map.get("float") {
                    x.as_f64().map(RealConstant::Float).ok_or_else(|| ConstantError::Malformed(x.to_string()))
                } else {
                    Err(ConstantError::Malformed(value.to_string()))
                }
            }
            other => Err(ConstantError::Malformed(other.to_string())),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RealConstant::Exact(r) => Value::String(format_rational(r)),
            RealConstant::Cf(spec) => serde_json::json!({ "cf": spec.shorthand() }),
            RealConstant::Float(x) => serde_json::json!({ "float": x }),
            RealConstant::Opaque(text) => serde_json::json!({ "opaque": text }),
        }
    }

    /// `-x` when it can be represented in the same tag.
    pub fn negated(&self) -> Option<Self> {
        match self {
            RealConstant::Exact(r) => Some(RealConstant::Exact(-r.clone())),
            RealConstant::Float(x) => Some(RealConstant::Float(-x)),
            RealConstant::Cf(_) | RealConstant::Opaque(_) => None,
        }
    }

    pub fn is_negative_exact(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_negative())
    }
}

impl fmt::Display for RealConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealConstant::Exact(r) => f.write_str(&format_rational(r)),
            RealConstant::Cf(spec) => write!(f, "cf[{spec}]"),
            RealConstant::Float(x) => write!(f, "{x:e}"),
            RealConstant::Opaque(text) => write!(f, "<{text}>"),
        }
    }
}

impl Serialize for RealConstant {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealConstant {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        RealConstant::from_json(&value).map_err(serde::de::Error::custom)
    }
}
