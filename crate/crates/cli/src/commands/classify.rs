use torus_hypo::system::{classify_system, DecideOptions};

use super::{decision_code, load_spec, path_arg, resolve_order, timed, Context};
use crate::args::{ClassifyArgs, Mode};
use crate::error::CliError;
use crate::report::Report;

pub fn run(args: &ClassifyArgs, _ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    report.arg("spec", path_arg(&args.spec));
    report.arg("s", &args.s);
    report.arg("mode", if args.mode == Mode::Smooth { "smooth" } else { "gevrey" });
    report.arg("horizon", args.horizon);
    let spec = load_spec(report, &args.spec)?;
    let order = resolve_order(args.s.as_deref(), args.mode, spec.s)?;
    let (analysis, verdict) = timed(report, "classify", || classify_system(&spec, order, DecideOptions { horizon: args.horizon }))?;
    report.set("verdict", verdict.decision_str());
    report.set("order", order);
    report.set("explanation", &verdict.explanation);
    report.set("witness", &verdict.witness);
    report.set("analysis", &analysis);
    if let Some(note) = &spec.note {
        report.set("note", note);
    }
    Ok(decision_code(verdict.decision))
}
