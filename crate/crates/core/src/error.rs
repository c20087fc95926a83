use thiserror::Error;

use crate::cases::Variant;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the hypotheses of the inequality.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires a {expected} case, got {got:?}")]
    WrongVariant { expected: &'static str, got: Variant },

    #[error("no feasible point: {0}")]
    NoFeasiblePoint(String),

    #[error("no convergence after {evaluations} evaluations")]
    NonConvergence { evaluations: usize },

    #[error("integrand is not integrable: {0}")]
    Integrability(String),

    #[error("tolerance not met: estimate {value:e} with error {error:e} after {subdivisions} subdivisions")]
    ToleranceNotMet {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand returned a non-finite value at {at:e}")]
    NonFinite { at: f64 },

    /// lhs exceeded constant times rhs. Since the inequality holds, this
    /// points to a numerical or coding error, or a wrong constant.
    #[error("inequality violated: ratio {ratio} exceeds 1")]
    RatioExceedsOne { ratio: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::WrongVariant { .. } => 1,
            Error::NoFeasiblePoint(_)
            | Error::NonConvergence { .. }
            | Error::Integrability(_)
            | Error::ToleranceNotMet { .. }
            | Error::NonFinite { .. } => 2,
            Error::RatioExceedsOne { .. } => 3,
            Error::Config(_) => 64,
        }
    }
}
