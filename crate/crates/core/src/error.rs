use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown model `{name}`; valid builtins are: {}", valid.join(", "))]
    UnknownModel { name: String, valid: Vec<&'static str> },

    #[error("expression error at byte {pos}: {msg}")]
    Expr { pos: usize, msg: String },

    #[error("non-finite value of {what} at r = {r}")]
    NonFinite { what: &'static str, r: f64 },

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("equilibrium tail is not integrable ({0}); the growth hypotheses on b and sigma are violated")]
    NonIntegrableTail(String),

    #[error("quadrature did not converge on [{a}, {b}]: achieved relative error {achieved:e}")]
    Quadrature { a: f64, b: f64, achieved: f64 },

    #[error("no (c, R) in the search box satisfies (d-1)/R + c <= beta*eps/2 = {bound}")]
    NoLyapunovCandidate { bound: f64 },

    #[error("Lyapunov drift inequality violated: worst residual {0:e} > 0")]
    LyapunovViolated(f64),

    #[error("Poincare bound inconsistent with spectrum: 1/c2 = {inv_c2:e} > lambda1 = {lambda1:e}")]
    InconsistentPoincare { inv_c2: f64, lambda1: f64 },

    #[error("time step {dt} too large: density went negative ({min:e}); try dt <= {suggested}")]
    TimeStepTooLarge { dt: f64, min: f64, suggested: f64 },

    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NonIntegrableTail(_)
                | Error::Quadrature { .. }
                | Error::LyapunovViolated(_)
                | Error::InconsistentPoincare { .. }
                | Error::TimeStepTooLarge { .. }
                | Error::Eigen(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
