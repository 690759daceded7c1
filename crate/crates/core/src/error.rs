use thiserror::Error;

use crate::model::State;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown parameter name `{0}`")]
    UnknownParam(String),

    #[error("singular evaluation at (u, v) = ({u}, {v}): {what}")]
    Singular { u: f64, v: f64, what: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite evaluation at t = {t}: {what}")]
    EvaluationFailure { t: f64, what: String },

    #[error("step size underflow at t = {t} (last good state {state:?})")]
    StiffnessFailure { t: f64, state: State },

    #[error("not a Hopf point: {0}")]
    NotHopf(String),

    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("no separatrix: {0}")]
    NoSeparatrix(String),

    #[error("no homoclinic bracket: {0}")]
    NoBracket(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::UnknownParam(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::InvalidConfig(_) => "invalid_config",
            Error::UnknownParam(_) => "unknown_param",
            Error::Singular { .. } => "singular",
            Error::Unsupported(_) => "unsupported",
            Error::EvaluationFailure { .. } => "evaluation_failure",
            Error::StiffnessFailure { .. } => "stiffness_failure",
            Error::NotHopf(_) => "not_hopf",
            Error::NoConvergence(_) => "no_convergence",
            Error::NoSeparatrix(_) => "no_separatrix",
            Error::NoBracket(_) => "no_bracket",
        }
    }
}
