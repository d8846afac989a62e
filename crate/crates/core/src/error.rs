use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature hit its subdivision limit before reaching the
    /// requested tolerance.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (best estimate {estimate:e}, error estimate {est_error:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        est_error: f64,
        evaluations: usize,
    },

    /// The MGF was requested at or beyond its pole on the positive axis.
    #[error("MGF argument s = {s} lies at or beyond the pole at {pole}")]
    MgfPole { s: f64, pole: f64 },

    /// A root search target is not bracketed by the curve values.
    #[error("target {target:e} is not bracketed: curve spans [{low:e}, {high:e}] on the bracket")]
    NotBracketed { target: f64, low: f64, high: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
