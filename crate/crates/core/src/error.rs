use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated an operation contract (missing or inconsistent inputs).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A precondition on the operator (spectrum, eigenvalue) does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The evaluation point sits on (or numerically at) the spectrum.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// The moment data describes a measure supported on finitely many points.
    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    /// A ratio denominator vanished in an inverse formula.
    #[error("degenerate ratio: {0}")]
    DegenerateRatio(String),

    /// An iteration or schedule did not settle.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// The dichotomy condition failed for a diagonal system.
    #[error("dichotomy violated: {0}")]
    Dichotomy(String),

    /// No contraction cutoff exists inside the stored window.
    #[error("cutoff selection failed: {0}")]
    Cutoff(String),

    /// An edge limit neither converged nor diverged clearly.
    #[error("inconclusive edge classification: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
