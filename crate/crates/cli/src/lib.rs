//! The `torus-hypo` command line: argument parsing, the subcommands and
//! their deterministic JSON reports.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use serde_json::json;

pub use args::Cli;
use args::Command;
use commands::Context;
pub use error::{code, CliError};
pub use report::Report;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "TORUS_HYPO_THREADS";

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub error: Option<CliError>,
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify(_) => "classify",
        Command::Cf(_) => "cf",
        Command::Solve(_) => "solve",
        Command::Singular(_) => "singular",
        Command::Normalform(_) => "normalform",
        Command::Diagnose(_) => "diagnose",
    }
}

/// Runs a parsed command line. Errors are recorded in the report.
pub fn run(cli: &Cli) -> Outcome {
    let mut report = Report::new(command_name(&cli.command));
    if cli.timing {
        report.enable_timing();
    }
    report.arg("precision", cli.precision);
    let ctx = Context { precision: cli.precision };
    let result = match &cli.command {
        Command::Classify(a) => commands::classify::run(a, &ctx, &mut report),
        Command::Cf(c) => commands::cf::run(c, &ctx, &mut report),
        Command::Solve(a) => commands::solve::run(a, &ctx, &mut report),
        Command::Singular(a) => commands::singular::run(a, &ctx, &mut report),
        Command::Normalform(a) => commands::normalform::run(a, &ctx, &mut report),
        Command::Diagnose(a) => commands::diagnose::run(a, &ctx, &mut report),
    };
    match result {
        Ok(code) => {
            report.set("exit_code", code);
            Outcome { report, code, error: None }
        }
        Err(e) => {
            let code = e.exit_code();
            report.set("error", json!({ "kind": e.kind(), "message": e.to_string() }));
            report.set("exit_code", code);
            Outcome { report, code, error: Some(e) }
        }
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<Option<usize>, CliError> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Malformed(format!("{THREADS_ENV} must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    Ok(Some(n))
}
