use thiserror::Error;

use crate::model::Scale;

/// Errors raised by the statistics toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence too short: {name} has {len} observations, need at least 2")]
    SequenceTooShort { name: &'static str, len: usize },

    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("cannot parse alpha {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("alpha {value} outside (0, 0.5)")]
    AlphaOutOfRange { value: f64 },

    #[error("empty draws")]
    EmptyDraws,

    #[error("{len} draws cannot resolve tail mass {tail_mass}; need at least {required}")]
    InsufficientDraws {
        len: usize,
        tail_mass: f64,
        required: usize,
    },

    #[error("{fraction} of control-mean draws are nonpositive (tolerance {tolerance}); relative statistics withheld")]
    NonpositiveControl { fraction: f64, tolerance: f64 },

    #[error("zero pooled variance")]
    ZeroPooledVariance,

    #[error("scale mismatch: expected {expected:?}, got {actual:?}")]
    ScaleMismatch { expected: Scale, actual: Scale },

    #[error("studies fall in different sign regimes")]
    MixedSignRegime,

    #[error("statistic {0} is unavailable for this study")]
    StatisticUnavailable(&'static str),

    #[error("infeasible series: {0}")]
    InfeasibleSeries(String),

    #[error("regime infeasible after {attempts} attempts: {reason}")]
    RegimeInfeasible { attempts: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
