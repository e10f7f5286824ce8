//! Errors and the exit codes they map to.

use std::path::PathBuf;

use torus_hypo::constant::ConstantError;
use torus_hypo::diophantine::DiophantineError;
use torus_hypo::singular::SingularError;
use torus_hypo::solver::SolverError;
use torus_hypo::system::SystemError;

pub mod code {
    pub const HYPOELLIPTIC: i32 = 0;
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const MALFORMED: i32 = 2;
    pub const NOT_HYPOELLIPTIC: i32 = 10;
    pub const UNKNOWN: i32 = 20;
    pub const SOLVABILITY: i32 = 30;
    pub const PROFILE: i32 = 31;
    pub const ZERO_DIVISOR: i32 = 32;
    pub const COMPATIBILITY: i32 = 33;
    pub const NOT_NORMALIZED: i32 = 34;
    pub const SOLVER: i32 = 35;
    pub const REFUSED_HYPOELLIPTIC: i32 = 40;
    pub const FAILED: i32 = 41;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("refused: {0}")]
    RefusedHypoelliptic(String),
    #[error(transparent)]
    Singular(SingularError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => code::IO,
            CliError::Malformed(_) => code::MALFORMED,
            CliError::Solver(e) => solver_code(e),
            CliError::RefusedHypoelliptic(_) => code::REFUSED_HYPOELLIPTIC,
            CliError::Singular(_) | CliError::Failed(_) => code::FAILED,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Malformed(_) => "Malformed",
            CliError::Solver(e) => match e {
                SolverError::Solvability(_) => "SolvabilityError",
                SolverError::Profile(_) => "ProfileError",
                SolverError::ZeroDivisor { .. } => "ZeroDivisor",
                SolverError::Compatibility { .. } => "CompatibilityError",
                SolverError::NotNormalized(_) => "NotNormalized",
                _ => "SolverError",
            },
            CliError::RefusedHypoelliptic(_) => "RefusedHypoelliptic",
            CliError::Singular(_) => "SingularError",
            CliError::Failed(_) => "Failed",
        }
    }
}

fn solver_code(e: &SolverError) -> i32 {
    match e {
        SolverError::Solvability(_) => code::SOLVABILITY,
        SolverError::Profile(_) => code::PROFILE,
        SolverError::ZeroDivisor { .. } => code::ZERO_DIVISOR,
        SolverError::Compatibility { .. } => code::COMPATIBILITY,
        SolverError::NotNormalized(_) => code::NOT_NORMALIZED,
        _ => code::SOLVER,
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        match e {
            SystemError::Malformed(_) | SystemError::OrderRejected(_) | SystemError::Constant(ConstantError::Malformed(_)) => CliError::Malformed(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<DiophantineError> for CliError {
    fn from(e: DiophantineError) -> Self {
        match e {
            DiophantineError::MalformedDigit { .. }
            | DiophantineError::NonPositiveDigit { .. }
            | DiophantineError::MalformedSpec(_)
            | DiophantineError::InvalidArgument(_)
            | DiophantineError::MalformedWitness(_) => CliError::Malformed(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<SingularError> for CliError {
    fn from(e: SingularError) -> Self {
        match e {
            SingularError::Solver(s) => CliError::Solver(s),
            SingularError::OrderError(_) | SingularError::Invalid(_) => CliError::Malformed(e.to_string()),
            other => CliError::Singular(other),
        }
    }
}
