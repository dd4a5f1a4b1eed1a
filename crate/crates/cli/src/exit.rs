use std::fmt;
use std::process::ExitCode;

use rateflow::Error;

/// Successful completion of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ChecksFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::ChecksFailed => 1,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        CliError::Config(anyhow::anyhow!("{msg}"))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    /// Classifies a library error raised while solving: a functional that the
    /// chosen solver cannot handle is a configuration problem.
    pub fn from_solver(e: Error) -> Self {
        match e {
            Error::UnsupportedFunctional { .. }
            | Error::NoKRepresentation(_)
            | Error::UnknownName { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_) => CliError::Config(e.into()),
            other => CliError::Solver(other.into()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e:#}"),
            CliError::Solver(e) => write!(f, "solver error: {e:#}"),
        }
    }
}

pub fn exit_code(result: Result<Outcome, CliError>) -> ExitCode {
    match result {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
