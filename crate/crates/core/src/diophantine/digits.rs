//! Digit streams `a_1, a_2, ...` of simple continued fractions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::DiophantineError;

/// JSON description of a digit stream.
///
/// ```json
/// {"kind":"explicit","digits":["10","100"]}
/// {"kind":"factorial_pow10"}
/// {"kind":"constant","digit":"1"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DigitSpec {
    /// A finite list of digits (the value is then rational).
    Explicit { digits: Vec<String> },
    /// `a_n = 10^{n!}`.
    FactorialPow10,
    /// Every digit equal to `digit`.
    Constant { digit: String },
}

/// One partial quotient. Digits too large to materialise are carried by
/// their logarithm only.
#[derive(Debug, Clone, PartialEq)]
pub enum Digit {
    Exact(BigUint),
    LogOnly { ln: TwoFloat },
}

impl Digit {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Digit::Exact(d) => Some(d),
            Digit::LogOnly { .. } => None,
        }
    }

    pub fn ln(&self) -> TwoFloat {
        match self {
            Digit::Exact(d) => crate::exact::ln_biguint_dd(d),
            Digit::LogOnly { ln } => *ln,
        }
    }
}

impl DigitSpec {
    /// `true` when the stream never terminates (the value is irrational).
    pub fn is_infinite(&self) -> bool {
        !matches!(self, DigitSpec::Explicit { .. })
    }

    /// Number of available digits, `None` for infinite streams.
    pub fn len(&self) -> Option<usize> {
        match self {
            DigitSpec::Explicit { digits } => Some(digits.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Checks every digit that can be checked without expanding the stream.
    pub fn validate(&self) -> Result<(), DiophantineError> {
        match self {
            DigitSpec::Explicit { digits } => {
                for (i, _) in digits.iter().enumerate() {
                    self.digit(i + 1, usize::MAX)?;
                }
                Ok(())
            }
            DigitSpec::Constant { .. } => self.digit(1, usize::MAX).map(|_| ()),
            DigitSpec::FactorialPow10 => Ok(()),
        }
    }

    /// The `n`-th digit (1-based). Digits with more than `cap_digits`
    /// decimal digits are returned in log form.
    pub fn digit(&self, n: usize, cap_digits: usize) -> Result<Digit, DiophantineError> {
        assert!(n >= 1, "digits are 1-based");
        let parse = |text: &str, index: usize| -> Result<Digit, DiophantineError> {
            let value = BigUint::from_str(text.trim()).map_err(|_| DiophantineError::MalformedDigit {
                index,
                text: text.to_string(),
            })?;
            if value.is_zero() {
                return Err(DiophantineError::NonPositiveDigit { index });
            }
            Ok(Digit::Exact(value))
        };
        match self {
            DigitSpec::Explicit { digits } => match digits.get(n - 1) {
                Some(text) => parse(text, n),
                None => Err(DiophantineError::DigitStreamExhausted { requested: n, available: digits.len() }),
            },
            DigitSpec::Constant { digit } => parse(digit, n),
            DigitSpec::FactorialPow10 => {
                let fact = factorial_f64(n).ok_or(DiophantineError::DigitOverflow { index: n })?;
                if fact + 1.0 <= cap_digits as f64 {
                    let exponent = fact as usize;
                    Ok(Digit::Exact(num_traits::pow(BigUint::from(10u32), exponent)))
                } else {
                    Ok(Digit::LogOnly { ln: twofloat::consts::LN_10 * TwoFloat::from(fact) })
                }
            }
        }
    }

    /// Short text form used on the command line.
    pub fn shorthand(&self) -> String {
        self.to_string()
    }
}

fn factorial_f64(n: usize) -> Option<f64> {
    let mut acc = 1.0f64;
    for k in 2..=n {
        acc *= k as f64;
    }
    acc.is_finite().then_some(acc)
}

impl fmt::Display for DigitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitSpec::Explicit { digits } => write!(f, "explicit:{}", digits.join(",")),
            DigitSpec::FactorialPow10 => f.write_str("factorial_pow10"),
            DigitSpec::Constant { digit } => write!(f, "constant:{digit}"),
        }
    }
}

impl FromStr for DigitSpec {
    type Err = DiophantineError;

    /// Accepts the JSON form or the shorthands `factorial_pow10`,
    /// `constant:<d>` and `explicit:<d1>,<d2>,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let spec = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| DiophantineError::MalformedSpec(e.to_string()))?
        } else if s == "factorial_pow10" {
            DigitSpec::FactorialPow10
        } else if let Some(d) = s.strip_prefix("constant:") {
            DigitSpec::Constant { digit: d.trim().to_string() }
        } else if let Some(list) = s.strip_prefix("explicit:") {
            DigitSpec::Explicit { digits: list.split(',').map(|d| d.trim().to_string()).collect() }
        } else {
            return Err(DiophantineError::MalformedSpec(format!("unknown digit stream `{s}`")));
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shorthands_and_json() {
        assert_eq!("factorial_pow10".parse::<DigitSpec>().unwrap(), DigitSpec::FactorialPow10);
        assert_eq!(
            "constant:1".parse::<DigitSpec>().unwrap(),
            DigitSpec::Constant { digit: "1".into() }
        );
        let json = r#"{"kind":"explicit","digits":["10","100"]}"#;
        let spec: DigitSpec = json.parse().unwrap();
        assert_eq!(spec.len(), Some(2));
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        assert!("constant:0".parse::<DigitSpec>().is_err());
        assert!("explicit:3,x".parse::<DigitSpec>().is_err());
        assert!("golden".parse::<DigitSpec>().is_err());
    }

    #[test]
    fn factorial_digits_switch_to_log_form() {
        let spec = DigitSpec::FactorialPow10;
        assert_eq!(spec.digit(3, 1000).unwrap(), Digit::Exact(BigUint::from(1_000_000u32)));
        match spec.digit(8, 1000).unwrap() {
            Digit::LogOnly { ln } => {
                let expect = 40320.0 * std::f64::consts::LN_10;
                assert!((f64::from(ln) - expect).abs() < 1e-9);
            }
            other => panic!("expected log-only digit, got {other:?}"),
        }
    }

    #[test]
    fn explicit_stream_exhausts() {
        let spec = DigitSpec::Explicit { digits: vec!["2".into()] };
        assert!(matches!(spec.digit(2, 10), Err(DiophantineError::DigitStreamExhausted { .. })));
    }
}
