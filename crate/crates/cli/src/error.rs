use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or missing input; nothing was written.
    #[error("input error: {0}")]
    Input(String),
    /// Some rows have a control mean too close to zero for relative statistics.
    /// Every row was still written.
    #[error("relative scale infeasible for rows {rows:?}: control-mean posterior reaches zero")]
    NonpositiveControl { rows: Vec<String> },
    /// The parameter sampler could not satisfy the study's regime.
    #[error("simulation infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::NonpositiveControl { .. } => 3,
            CliError::Infeasible(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl From<leastdiff::Error> for CliError {
    fn from(err: leastdiff::Error) -> Self {
        use leastdiff::Error as E;
        match err {
            E::RegimeInfeasible { .. } => CliError::Infeasible(err.to_string()),
            E::InvalidInput { .. }
            | E::Parse { .. }
            | E::AlphaOutOfRange { .. }
            | E::InfeasibleSeries(_)
            | E::ScaleMismatch { .. }
            | E::SequenceTooShort { .. } => CliError::Input(err.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
