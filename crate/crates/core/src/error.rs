use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Quantum numbers or arguments outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The interaction tensor was evaluated at zero separation.
    #[error("interaction tensor is singular at zero separation")]
    Singularity,

    /// A radial integral does not converge for the requested moment.
    #[error("integrand not integrable: {0}")]
    Integrability(String),

    #[error("quadrature failed to converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    /// Parameters fall outside the regime in which a model is valid.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("estimation error: {0}")]
    Estimation(String),
}
