//! Reports with a byte-stable JSON rendering: keys sorted, every float
//! printed with 17 significant digits.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, Default)]
pub struct Report {
    command: String,
    args: Map<String, Value>,
    digest: Sha256,
    inputs: usize,
    result: Map<String, Value>,
    timing: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Default::default() }
    }

    pub fn arg(&mut self, key: &str, value: impl Serialize) {
        self.args.insert(key.to_string(), to_value(value));
    }

    /// Adds an input's bytes to the digest.
    pub fn input(&mut self, bytes: &[u8]) {
        self.digest.update((bytes.len() as u64).to_le_bytes());
        self.digest.update(bytes);
        self.inputs += 1;
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.result.insert(key.to_string(), to_value(value));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.result.get(key)
    }

    pub fn enable_timing(&mut self) {
        self.timing = Some(BTreeMap::new());
    }

    pub fn time(&mut self, key: &str, seconds: f64) {
        if let Some(t) = &mut self.timing {
            t.insert(key.to_string(), seconds);
        }
    }

    pub fn digest(&self) -> String {
        format!("sha256:{:x}", self.digest.clone().finalize())
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("format_version".into(), FORMAT_VERSION.into());
        let mut command = Map::new();
        command.insert("name".into(), self.command.clone().into());
        command.insert("args".into(), Value::Object(self.args.clone()));
        root.insert("command".into(), Value::Object(command));
        root.insert("input_digest".into(), self.digest().into());
        root.insert("inputs".into(), self.inputs.into());
        root.insert("result".into(), Value::Object(self.result.clone()));
        if let Some(t) = &self.timing {
            root.insert("runtime".into(), to_value(t));
        }
        Value::Object(root)
    }

    pub fn render(&self) -> String {
        render(&self.to_value())
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or_else(|e| Value::String(format!("unserialisable: {e}")))
}

/// `x` with 17 significant digits, or `null` when not finite.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // no negative zero
        "0.0000000000000000e0".into()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Pretty JSON with sorted keys and fixed float formatting.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (_, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serialises")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(key).expect("string serialises"));
                out.push_str(": ");
                write_value(&map[*key], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(2.0), "2.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "null");
        let v: f64 = format_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn keys_sorted_and_output_is_json() {
        let text = render(&json!({"b": [1, 2.5], "a": {"z": null, "y": "q\""}}));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["b"][1], json!(2.5));
        assert_eq!(back["a"]["y"], json!("q\""));
    }

    #[test]
    fn digest_depends_on_inputs_only() {
        let mut a = Report::new("x");
        let mut b = Report::new("x");
        a.input(b"spec");
        b.input(b"spec");
        b.set("k", 1);
        assert_eq!(a.digest(), b.digest());
        b.input(b"more");
        assert_ne!(a.digest(), b.digest());
    }
}
