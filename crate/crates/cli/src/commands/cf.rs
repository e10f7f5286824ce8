use serde_json::{json, Value};
use torus_hypo::diophantine::{
    classify, condition_b_check, exp_liouville_score, liouville_exponent_trend, ContinuedFraction, Digit, DigitSpec,
};
use torus_hypo::exact::format_rational;

use super::{parse_order, timed, Context};
use crate::args::{CfArgs, CfCommand, ConditionBArgs};
use crate::error::{code, CliError};
use crate::report::Report;

fn digit_json(d: &Digit) -> Value {
    match d {
        Digit::Exact(v) => Value::String(v.to_string()),
        Digit::LogOnly { ln } => json!({ "ln": f64::from(*ln) }),
    }
}

fn parse_digits(text: &str) -> Result<DigitSpec, CliError> {
    Ok(text.parse::<DigitSpec>()?)
}

fn common_args(name: &str, args: &CfArgs, report: &mut Report) -> Result<(DigitSpec, ContinuedFraction), CliError> {
    report.arg("subcommand", name);
    report.arg("digits", &args.digits);
    report.arg("n", args.n);
    report.arg("s", &args.s);
    report.input(args.digits.as_bytes());
    if args.n == 0 {
        return Err(CliError::Malformed("--n must be positive".into()));
    }
    let spec = parse_digits(&args.digits)?;
    // one extra convergent so the brackets at index n have a_{n+1}
    let count = match spec.len() {
        Some(len) => (args.n + 1).min(len),
        None => args.n + 1,
    };
    let cf = ContinuedFraction::expand(&spec, count)?;
    Ok((spec, cf))
}

pub fn run(cmd: &CfCommand, _ctx: &Context, report: &mut Report) -> Result<i32, CliError> {
    match cmd {
        CfCommand::Convergents(args) => convergents(args, report),
        CfCommand::Bounds(args) => bounds(args, report),
        CfCommand::Classify(args) => classify_cmd(args, report),
        CfCommand::ConditionB(args) => condition_b(args, report),
    }
}

fn convergents(args: &CfArgs, report: &mut Report) -> Result<i32, CliError> {
    let (spec, cf) = common_args("convergents", args, report)?;
    let n = args.n.min(cf.len());
    let rows: Vec<Value> = cf
        .convergents(n)?
        .iter()
        .map(|c| {
            Ok(json!({
                "n": c.index,
                "a": digit_json(cf.digit(c.index)?),
                "p": c.p.as_ref().map(ToString::to_string),
                "q": c.q.as_ref().map(ToString::to_string),
                "ln_p": f64::from(c.ln_p),
                "ln_q": f64::from(c.ln_q),
            }))
        })
        .collect::<Result<_, CliError>>()?;
    report.set("stream", spec.shorthand());
    report.set("convergents", rows);
    Ok(code::OK)
}

fn bounds(args: &CfArgs, report: &mut Report) -> Result<i32, CliError> {
    let (spec, cf) = common_args("bounds", args, report)?;
    if spec.len().is_some_and(|len| args.n >= len) {
        return Err(CliError::Malformed(format!("a finite stream of {} digits has brackets up to n = {}", cf.len(), cf.len() - 1)));
    }
    let mut rows = Vec::with_capacity(args.n);
    for n in 1..=args.n {
        let logs = cf.log_interval(n)?;
        let mut row = json!({ "n": n, "ln_lower": logs.ln_lower, "ln_upper": logs.ln_upper });
        if let Ok(iv) = cf.approx_interval(n) {
            row["lower"] = Value::String(format_rational(&iv.lower));
            row["upper"] = Value::String(format_rational(&iv.upper));
        }
        rows.push(row);
    }
    let last = rows.last().cloned().unwrap_or(Value::Null);
    report.set("stream", spec.shorthand());
    report.set("interval", json!([last.get("lower"), last.get("upper")]));
    report.set("bounds", rows);
    Ok(code::OK)
}

fn classify_cmd(args: &CfArgs, report: &mut Report) -> Result<i32, CliError> {
    let (spec, cf) = common_args("classify", args, report)?;
    let s = args.s.as_deref().map(parse_order).transpose()?;
    let verdict = timed(report, "classify", || classify(&spec, s, args.n))?;
    report.set("stream", spec.shorthand());
    report.set("summary", verdict.summary());
    report.set("verdict", &verdict);
    if spec.is_infinite() {
        report.set("exponent_trend", liouville_exponent_trend(&cf, args.n)?);
        if let Some(s) = s {
            report.set("exp_liouville_score", exp_liouville_score(&cf, s, args.n)?);
        }
    }
    Ok(code::OK)
}

fn condition_b(args: &ConditionBArgs, report: &mut Report) -> Result<i32, CliError> {
    report.arg("subcommand", "condition-b");
    report.arg("digits", &args.digits);
    report.arg("n", args.n);
    report.arg("s", &args.s);
    report.arg("epsilon", args.epsilon);
    report.arg("from", args.start);
    report.input(args.digits.as_bytes());
    let spec = parse_digits(&args.digits)?;
    let s = parse_order(&args.s)?;
    let cf = ContinuedFraction::expand(&spec, args.n + 1)?;
    let rows = condition_b_check(&cf, s, args.epsilon, args.start, args.n)?;
    report.set("stream", spec.shorthand());
    report.set("all_certified", rows.iter().all(|r| r.certified));
    report.set("rows", rows);
    Ok(code::OK)
}
