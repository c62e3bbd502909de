use std::fmt;

use lambda_cavity::Error;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Precondition(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NegativeRate { .. }
            | Error::NonFinite { .. }
            | Error::MissingCavityFrequency
            | Error::NonpositiveBeta(_)
            | Error::NonpositiveEpsilon(_)
            | Error::NonpositiveTemperature(_)
            | Error::InvalidTruncation(_)
            | Error::InvalidGrid(_)
            | Error::DimensionMismatch { .. } => CliError::Config(msg),
            Error::NonzeroDetuning(_)
            | Error::AnalyticInvalidHere
            | Error::DivisionDegenerate { .. }
            | Error::FullyDegenerate
            | Error::DegenerateDamping
            | Error::DegeneratePoles
            | Error::TruncationNotConverged { .. } => CliError::Precondition(msg),
            Error::NonUniqueSteadyState { .. }
            | Error::SolverFailure(_)
            | Error::IntegrationFailure(_) => CliError::Solver(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
