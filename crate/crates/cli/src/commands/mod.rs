//! One module per subcommand. Each fills a [`Report`] and returns the exit
//! code of a successful run.

pub mod cf;
pub mod classify;
pub mod diagnose;
pub mod normalform;
pub mod singular;
pub mod solve;

use std::path::Path;
use std::time::Instant;

use torus_hypo::exact::{parse_rational, rational_to_f64};
use torus_hypo::field::FourierField;
use torus_hypo::system::{Decision, Order, SystemSpec};

use crate::args::Mode;
use crate::error::{code, CliError};
use crate::report::Report;

/// Settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub precision: u32,
}

pub(crate) fn read_input(report: &mut Report, path: &Path) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    report.input(&bytes);
    Ok(bytes)
}

pub(crate) fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn load_spec(report: &mut Report, path: &Path) -> Result<SystemSpec, CliError> {
    let bytes = read_input(report, path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    Ok(SystemSpec::from_json_str(text)?)
}

/// A field in JSON or in the binary `THFF` layout.
pub(crate) fn parse_field(bytes: &[u8]) -> Result<FourierField, CliError> {
    if bytes.starts_with(b"THFF") {
        FourierField::read_binary(bytes).map_err(|e| CliError::Malformed(e.to_string()))
    } else {
        serde_json::from_slice(bytes).map_err(|e| CliError::Malformed(format!("field: {e}")))
    }
}

/// Gevrey order from a decimal or rational string.
pub(crate) fn parse_order(text: &str) -> Result<f64, CliError> {
    let r = parse_rational(text).map_err(|e| CliError::Malformed(format!("--s {text}: {e}")))?;
    let s = rational_to_f64(&r);
    if !(s >= 1.0 && s.is_finite()) {
        return Err(CliError::Malformed(format!("--s must be at least 1, got {text}")));
    }
    Ok(s)
}

pub(crate) fn resolve_order(s: Option<&str>, mode: Mode, default: Order) -> Result<Order, CliError> {
    match (mode, s) {
        (Mode::Smooth, _) => Ok(Order::Smooth),
        (Mode::Gevrey, Some(text)) => Ok(Order::Gevrey(parse_order(text)?)),
        (Mode::Gevrey, None) => Ok(default),
    }
}

/// Gevrey order for the numeric fits: `--s`, else the spec's order, else 2.
pub(crate) fn fit_order(s: Option<&str>, spec: &SystemSpec) -> Result<f64, CliError> {
    match s {
        Some(text) => parse_order(text),
        None => Ok(spec.s.gevrey_s().filter(|s| *s > 1.0).unwrap_or(2.0)),
    }
}

pub(crate) fn decision_code(d: Decision) -> i32 {
    match d {
        Decision::Hypoelliptic => code::HYPOELLIPTIC,
        Decision::NotHypoelliptic => code::NOT_HYPOELLIPTIC,
        Decision::Unknown => code::UNKNOWN,
    }
}

pub(crate) fn path_arg(path: &Path) -> String {
    path.display().to_string()
}

/// Runs `f` and records its wall-clock time under `key`.
pub(crate) fn timed<T>(report: &mut Report, key: &str, f: impl FnOnce() -> T) -> T {
    let clock = Instant::now();
    let out = f();
    report.time(key, clock.elapsed().as_secs_f64());
    out
}
