//! The system model `L_j = d/dt_j + (a_j + i b_j)(t_j) d/dx`, `j = 1..n`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constant::RealConstant;
use crate::diophantine::LiouvilleWitness;
use crate::exact::parse_rational;
use crate::gevrey::RealTrig;

use super::SystemError;

/// Regularity class the question is asked in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// Gevrey order `s`.
    Gevrey(f64),
    /// `C^infinity`.
    Smooth,
    /// `s = 1`; accepted as input, not decided.
    Analytic,
}

impl Order {
    pub fn gevrey_s(&self) -> Option<f64> {
        match self {
            Order::Gevrey(s) => Some(*s),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Gevrey(s) => write!(f, "{s}"),
            Order::Smooth => f.write_str("smooth"),
            Order::Analytic => f.write_str("analytic"),
        }
    }
}

impl std::str::FromStr for Order {
    type Err = SystemError;

    /// `"smooth"`, `"analytic"`, or a decimal / rational order such as
    /// `"2"` or `"3/2"`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.trim() {
            "smooth" => Ok(Order::Smooth),
            "analytic" => Ok(Order::Analytic),
            other => {
                let r = parse_rational(other).map_err(|e| SystemError::Malformed(e.to_string()))?;
                Ok(Order::Gevrey(crate::exact::rational_to_f64(&r)))
            }
        }
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Value::deserialize(deserializer)? {
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            Value::Number(n) => n.as_f64().map(Order::Gevrey).ok_or_else(|| serde::de::Error::custom("bad order")),
            other => Err(serde::de::Error::custom(format!("bad order {other}"))),
        }
    }
}

/// The real part `a_j`: a trigonometric polynomial or a constant.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Trig(RealTrig),
    Constant(RealConstant),
}

impl Coefficient {
    /// Mean value; constants are their own average.
    pub fn average(&self) -> RealConstant {
        match self {
            Coefficient::Trig(p) => p.mean(),
            Coefficient::Constant(c) => c.clone(),
        }
    }

    /// The non-constant part as a trigonometric polynomial (zero for
    /// constants).
    pub fn oscillating_part(&self) -> RealTrig {
        match self {
            Coefficient::Trig(p) => p.without_mean(),
            Coefficient::Constant(_) => RealTrig::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Trig(p) => p.is_constant(),
            Coefficient::Constant(_) => true,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Coefficient::Trig(p) => p.eval(t),
            Coefficient::Constant(c) => c.to_f64(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Coefficient::Trig(p) => p.to_json(),
            Coefficient::Constant(c) => c.to_json(),
        }
    }

    pub fn from_json(value: &Value) -> Result<Self, SystemError> {
        let is_constant = match value {
            Value::String(_) | Value::Number(_) => true,
            Value::Object(map) => map.contains_key("cf") || map.contains_key("float") || map.contains_key("opaque"),
            _ => false,
        };
        if is_constant {
            Ok(Coefficient::Constant(RealConstant::from_json(value)?))
        } else {
            Ok(Coefficient::Trig(RealTrig::from_json(value)?))
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        Coefficient::from_json(&value).map_err(serde::de::Error::custom)
    }
}

/// Externally established Diophantine facts about a constant or vector,
/// for numbers the engine cannot classify from finite data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophantineClaim {
    /// Exponential-Liouville status at the listed orders (all orders when
    /// `orders` is absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_liouville: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<f64>>,
    /// Liouville status (used in smooth mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liouville: Option<bool>,
    /// Optional explicit approximation sequence backing an
    /// `exp_liouville: true` claim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<LiouvilleWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl DiophantineClaim {
    fn applies_to(&self, s: f64) -> bool {
        self.orders.as_ref().is_none_or(|o| o.iter().any(|x| (x - s).abs() < 1e-12))
    }

    /// Claimed exponential-Liouville status at order `s`.
    pub fn exp_liouville_at(&self, s: f64) -> Option<bool> {
        if self.applies_to(s) {
            self.exp_liouville
        } else {
            None
        }
    }
}

/// One vector field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tube {
    pub a: Coefficient,
    pub b: RealTrig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_claim: Option<DiophantineClaim>,
}

impl Tube {
    pub fn new(a: Coefficient, b: RealTrig) -> Self {
        Self { a, b, a_claim: None }
    }
}

/// A system on `T^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub n: usize,
    pub s: Order,
    pub tubes: Vec<Tube>,
    /// Claim about the vector of averages over the real fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_claim: Option<DiophantineClaim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SystemSpec {
    pub fn new(s: Order, tubes: Vec<Tube>) -> Self {
        Self { n: tubes.len(), s, tubes, vector_claim: None, note: None }
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        if self.tubes.is_empty() {
            return Err(SystemError::Malformed("a system needs at least one tube".into()));
        }
        if self.n != self.tubes.len() {
            return Err(SystemError::Malformed(format!("n = {} but {} tubes given", self.n, self.tubes.len())));
        }
        if let Order::Gevrey(s) = self.s {
            if !(s.is_finite() && s >= 1.0) {
                return Err(SystemError::Malformed(format!("Gevrey order must be >= 1, got {s}")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, SystemError> {
        let spec: SystemSpec = serde_json::from_str(text).map_err(|e| SystemError::Malformed(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Copy with a different regularity class.
    pub fn with_order(&self, s: Order) -> Self {
        Self { s, ..self.clone() }
    }

    /// The one-tube system made of tube `j` alone.
    pub fn single(&self, j: usize) -> Self {
        Self { n: 1, s: self.s, tubes: vec![self.tubes[j].clone()], vector_claim: None, note: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_form() {
        let text = r#"{"n":2, "s":"2", "tubes":[{"a":{"cf":"factorial_pow10"},"b":{"zero":true}}, {"a":"1/2","b":{"sin":["1"]}}]}"#;
        let spec = SystemSpec::from_json_str(text).unwrap();
        assert_eq!(spec.s, Order::Gevrey(2.0));
        assert!(matches!(spec.tubes[0].a, Coefficient::Constant(RealConstant::Cf(_))));
        assert!(spec.tubes[0].b.is_zero());
        let again = serde_json::to_string(&spec).unwrap();
        assert_eq!(SystemSpec::from_json_str(&again).unwrap(), spec);
    }

    #[test]
    fn trig_real_part() {
        let text = r#"{"n":1, "s":"3/2", "tubes":[{"a":{"const":"1/2","cos":["1"]},"b":{"const":"-1"}}]}"#;
        let spec = SystemSpec::from_json_str(text).unwrap();
        assert_eq!(spec.s, Order::Gevrey(1.5));
        assert_eq!(spec.tubes[0].a.average(), RealConstant::from_ratio(1, 2));
    }

    #[test]
    fn rejects_inconsistent_n() {
        let text = r#"{"n":2, "s":"smooth", "tubes":[{"a":"0","b":{"zero":true}}]}"#;
        assert!(SystemSpec::from_json_str(text).is_err());
    }
}
