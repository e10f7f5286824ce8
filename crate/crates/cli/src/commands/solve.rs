use serde::Deserialize;
use serde_json::json;
use torus_hypo::field::FourierField;
use torus_hypo::gevrey::DecayOptions;
use torus_hypo::normalform::{apply_gauge, build_normal_form, GaugeDirection};
use torus_hypo::solver::{decay_report, residual, solve_by_division, solve_single_tube, SolverError, TubeSolveOptions};
use torus_hypo::system::{sign_analysis, SignProfile};

use super::{fit_order, load_spec, path_arg, read_input, timed, write_output, Context};
use crate::args::SolveArgs;
use crate::error::{code, CliError};
use crate::report::{render, Report};

#[derive(Deserialize)]
struct RhsFile {
    f: Vec<serde_json::Value>,
}

fn load_rhs(bytes: &[u8]) -> Result<Vec<FourierField>, CliError> {
    let file: RhsFile = serde_json::from_slice(bytes).map_err(|e| CliError::Malformed(format!("rhs: {e}")))?;
    file.f
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| CliError::Malformed(format!("rhs field: {e}"))))
        .collect()
}

fn gauge_all(fields: &[FourierField], data: &torus_hypo::normalform::NormalFormData) -> Result<Vec<FourierField>, SolverError> {
    fields.iter().map(|f| Ok(apply_gauge(f, data, GaugeDirection::Forward)?)).collect()
}

pub fn run(args: &SolveArgs, ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    report.arg("spec", path_arg(&args.spec));
    report.arg("rhs", path_arg(&args.rhs));
    report.arg("out", args.out.as_deref().map(path_arg));
    report.arg("nodes", args.nodes);
    report.arg("s", &args.s);
    let spec = load_spec(report, &args.spec)?;
    let f = load_rhs(&read_input(report, &args.rhs)?)?;
    if f.len() != spec.n {
        return Err(CliError::Malformed(format!("{} right-hand sides for {} tubes", f.len(), spec.n)));
    }
    for g in &f {
        if g.n() != spec.n {
            return Err(CliError::Malformed(format!("rhs field has n = {}, system n = {}", g.n(), spec.n)));
        }
    }
    let s = fit_order(args.s.as_deref(), &spec)?;

    let data = build_normal_form(&spec);
    report.set("normal_form", json!({ "A": &data.a, "trivial": data.is_trivial() }));
    let gauged = gauge_all(&f, &data)?;
    let normalized = &data.normalized;
    let definite = normalized.tubes.iter().position(|t| sign_analysis(&t.b).profile.is_definite());
    let has_real = normalized.tubes.iter().any(|t| sign_analysis(&t.b).profile == SignProfile::IdenticallyZero);
    let v = match definite {
        Some(j) => {
            report.set("method", json!({ "kind": "single_tube", "tube": j + 1 }));
            let opts = TubeSolveOptions { min_nodes: args.nodes, ..Default::default() };
            timed(report, "solve", || solve_single_tube(j, normalized, &gauged[j], &opts))?
        }
        None if has_real => {
            let sol = timed(report, "solve", || solve_by_division(normalized, &gauged, ctx.precision))?;
            report.set(
                "method",
                json!({
                    "kind": "division",
                    "J": sol.j,
                    "zero_mode_fixed": sol.zero_mode_fixed,
                    "compatibility_defect": sol.compatibility_defect,
                }),
            );
            sol.u
        }
        None => {
            return Err(SolverError::Profile(
                "every b_j changes sign and J is empty: the system is not hypoelliptic and no solver applies".into(),
            )
            .into())
        }
    };
    let u = apply_gauge(&v, &data, GaugeDirection::Inverse).map_err(SolverError::from)?;
    let res = timed(report, "residual", || residual(&spec, &u, &f))?;
    let rows: Vec<_> = res.iter().enumerate().map(|(j, r)| json!({ "tube": j + 1, "residual": r, "max_rhs": f[j].max_abs() })).collect();
    report.set("residual", rows);
    report.set("max_residual", res.iter().copied().fold(0.0, f64::max));
    report.set(
        "solution",
        json!({
            "n": u.n(),
            "nt": u.nt(),
            "frequencies": u.len(),
            "xi_range": u.xi_range(),
            "max_abs": u.max_abs(),
            "sup_table": u.sup_table(),
        }),
    );
    let opts = DecayOptions { xi_min: 1.0, ..Default::default() };
    match decay_report(&u, s, &opts) {
        Ok(w) => report.set("decay_fit", w),
        Err(e) => report.set("decay_fit", json!({ "unavailable": e.to_string() })),
    }
    if let Some(out) = &args.out {
        if out.extension().is_some_and(|e| e == "thff") {
            let mut bytes = Vec::new();
            u.write_binary(&mut bytes).map_err(SolverError::from)?;
            write_output(out, &bytes)?;
        } else {
            let value = serde_json::to_value(&u).map_err(|e| CliError::Failed(e.to_string()))?;
            write_output(out, render(&value).as_bytes())?;
        }
    }
    Ok(code::OK)
}
