use serde_json::json;
use torus_hypo::normalform::{build_normal_form, conjugation_residual, gauge_growth};

use super::{fit_order, load_spec, parse_field, path_arg, read_input, write_output, Context};
use crate::args::NormalformArgs;
use crate::error::{code, CliError};
use crate::report::{render, Report};

/// Frequencies and grid of the gauge growth table.
const GROWTH_XI_MAX: u32 = 16;
const GROWTH_GRID: usize = 256;

pub fn run(args: &NormalformArgs, _ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    report.arg("spec", path_arg(&args.spec));
    report.arg("field", args.field.as_deref().map(path_arg));
    report.arg("out", args.out.as_deref().map(path_arg));
    report.arg("s", &args.s);
    report.arg("epsilon", args.epsilon);
    report.arg("max_order", args.max_order);
    let spec = load_spec(report, &args.spec)?;
    let s = fit_order(args.s.as_deref(), &spec)?;
    let data = build_normal_form(&spec);
    report.set("A", &data.a);
    report.set("trivial", data.is_trivial());
    report.set("normalized", &data.normalized);
    let mut growth = Vec::new();
    for (j, a) in data.a.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let table = gauge_growth(a, s, args.epsilon, args.max_order, GROWTH_XI_MAX, GROWTH_GRID)
            .map_err(|e| CliError::Failed(e.to_string()))?;
        growth.push(json!({ "tube": j + 1, "table": table }));
    }
    report.set("gauge_growth", growth);
    if let Some(path) = &args.field {
        let field = parse_field(&read_input(report, path)?)?;
        if field.n() != spec.n {
            return Err(CliError::Malformed(format!("field has n = {}, system n = {}", field.n(), spec.n)));
        }
        report.set("conjugation_residual", conjugation_residual(&spec, &field)?);
    }
    if let Some(out) = &args.out {
        let value = serde_json::to_value(&data.normalized).map_err(|e| CliError::Failed(e.to_string()))?;
        write_output(out, render(&value).as_bytes())?;
    }
    Ok(code::OK)
}
