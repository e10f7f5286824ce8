use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use torus_hypo_cli::{code, init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    let outcome = run(&cli);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    let text = outcome.report.render();
    let written = match &cli.report {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write the report: {e}");
        return ExitCode::from(code::IO as u8);
    }
    ExitCode::from(outcome.code as u8)
}
