use thiserror::Error;

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("iteration did not converge after {iterations} steps (last update {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("parameter outside the regime of validity: {0}")]
    OutOfRegime(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("ill-conditioned system (condition number {cond:.3e} exceeds {limit:.1e})")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("quadrature failure: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
