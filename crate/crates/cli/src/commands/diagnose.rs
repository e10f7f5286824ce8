use serde_json::{json, Value};
use torus_hypo::exact::rational_to_f64;
use torus_hypo::singular::locate_laplace_profile;
use torus_hypo::system::{classify_system, vector_evidence, DecideOptions, Order, SignProfile};

use super::{fit_order, load_spec, path_arg, Context};
use crate::args::DiagnoseArgs;
use crate::error::{code, CliError};
use crate::report::Report;

pub fn run(args: &DiagnoseArgs, ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    report.arg("spec", path_arg(&args.spec));
    report.arg("s", &args.s);
    report.arg("horizon", args.horizon);
    let spec = load_spec(report, &args.spec)?;
    let s = fit_order(args.s.as_deref(), &spec)?;
    let opts = DecideOptions { horizon: args.horizon };
    let (analysis, gevrey) = classify_system(&spec, Order::Gevrey(s), opts)?;
    let (_, smooth) = classify_system(&spec, Order::Smooth, opts)?;

    let mut tubes = Vec::with_capacity(spec.n);
    for (j, tube) in spec.tubes.iter().enumerate() {
        let a0 = &analysis.averages[j].a0;
        let sign = &analysis.signs[j];
        let enclosure = match a0.enclose(ctx.precision) {
            Ok(e) => json!({ "center": rational_to_f64(&e.center), "radius": rational_to_f64(&e.radius), "digits": ctx.precision }),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
        let classification = match a0.classify(Some(s), args.horizon) {
            Ok(v) => json!({ "summary": v.summary(), "verdict": v }),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
        let profile = if sign.profile == SignProfile::ChangesSign {
            let mirror = tube.b.constant() > 0.0;
            match locate_laplace_profile(&tube.b, mirror) {
                Ok(p) => serde_json::to_value(p).unwrap_or(Value::Null),
                Err(e) => json!({ "unavailable": e.to_string() }),
            }
        } else {
            Value::Null
        };
        tubes.push(json!({
            "tube": j + 1,
            "a": &tube.a,
            "b": &tube.b,
            "a0": a0,
            "b0": &analysis.averages[j].b0,
            "sign": sign,
            "a0_enclosure": enclosure,
            "a0_classification": classification,
            "laplace_profile": profile,
            "claim": &tube.a_claim,
        }));
    }
    report.set("tubes", tubes);
    report.set("J", &analysis.j);
    if !analysis.j.is_empty() {
        report.set("vector_evidence", vector_evidence(&analysis, &spec, Order::Gevrey(s), opts)?);
    }
    report.set(
        "decisions",
        json!({
            "gevrey": { "s": s, "verdict": gevrey.decision_str(), "explanation": gevrey.explanation },
            "smooth": { "verdict": smooth.decision_str(), "explanation": smooth.explanation },
        }),
    );
    if let Some(note) = &spec.note {
        report.set("note", note);
    }
    Ok(code::OK)
}
