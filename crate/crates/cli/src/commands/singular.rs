use std::path::Path;

use serde_json::json;
use torus_hypo::diophantine::LiouvilleWitness;
use torus_hypo::normalform::{apply_gauge, build_normal_form, GaugeDirection};
use torus_hypo::singular::{build_for_system, SingularOptions};
use torus_hypo::solver::SolverError;
use torus_hypo::system::{classify_system, DecideOptions, Decision, Order};

use super::{load_spec, parse_order, path_arg, read_input, timed, write_output, Context};
use crate::args::SingularArgs;
use crate::error::{code, CliError};
use crate::report::{render, Report};

fn load_witness(report: &mut Report, path: &Path) -> Result<LiouvilleWitness, CliError> {
    let bytes = read_input(report, path)?;
    let w: LiouvilleWitness = serde_json::from_slice(&bytes).map_err(|e| CliError::Malformed(format!("witness: {e}")))?;
    w.validate()?;
    Ok(w)
}

pub fn run(args: &SingularArgs, _ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    report.arg("spec", path_arg(&args.spec));
    report.arg("s", &args.s);
    report.arg("xi_max", args.xi_max);
    report.arg("k_max", args.k_max);
    report.arg("nt", args.nt);
    report.arg("rows", args.rows);
    report.arg("witness", args.witness.as_deref().map(path_arg));
    report.arg("out", args.out.as_deref().map(path_arg));
    let spec = load_spec(report, &args.spec)?;
    let s = match (&args.s, spec.s) {
        (Some(text), _) => parse_order(text)?,
        (None, Order::Gevrey(s)) => s,
        (None, other) => return Err(CliError::Malformed(format!("singular solutions need a Gevrey order s > 1, the spec has {other}"))),
    };
    if s <= 1.0 {
        return Err(CliError::Malformed(format!("Gevrey order must exceed 1, got {s}")));
    }
    if args.xi_max < 16 || args.k_max == 0 || args.nt < 4 {
        return Err(CliError::Malformed("need xi_max >= 16, k_max >= 1 and nt >= 4".into()));
    }
    let (_, verdict) = classify_system(&spec, Order::Gevrey(s), DecideOptions::default())?;
    report.set("verdict", verdict.decision_str());
    report.set("explanation", &verdict.explanation);
    match verdict.decision {
        Decision::Hypoelliptic => {
            return Err(CliError::RefusedHypoelliptic(format!(
                "the system is globally {s}-hypoelliptic ({}); every solution with Gevrey data is Gevrey, so no singular solution exists",
                verdict.explanation
            )))
        }
        Decision::Unknown => {
            return Err(CliError::Failed(format!("hypoellipticity is undecided ({}); no construction applies", verdict.explanation)))
        }
        Decision::NotHypoelliptic => {}
    }
    let witness = match &args.witness {
        Some(path) => Some(load_witness(report, path)?),
        None => spec.vector_claim.as_ref().and_then(|c| c.witness.clone()),
    };
    let opts = SingularOptions {
        s,
        xi_max: args.xi_max,
        k_max: args.k_max,
        nt: args.nt,
        field_rows: args.rows,
        power_window: (64f64.min(args.xi_max as f64 / 8.0), args.xi_max as f64),
    };
    let data = build_normal_form(&spec);
    let sol = timed(report, "build", || build_for_system(&data.normalized, &opts, witness.as_ref()))?;
    let coefficients = match &sol.coefficients {
        Some(c) if !data.is_trivial() => Some(apply_gauge(c, &data, GaugeDirection::Inverse).map_err(SolverError::from)?),
        other => other.clone(),
    };
    let cert = &sol.certificate;
    report.set("normal_form", json!({ "A": &data.a, "trivial": data.is_trivial() }));
    report.set("construction", &cert.construction);
    report.set("m", cert.m);
    report.set("q", sol.q);
    report.set("power_fit", cert.power_fit);
    report.set("checks", &cert.checks);
    report.set("certificate", cert);
    if let Some(out) = &args.out {
        let value = json!({ "certificate": cert, "coefficients": coefficients });
        write_output(out, render(&value).as_bytes())?;
    }
    Ok(code::OK)
}
