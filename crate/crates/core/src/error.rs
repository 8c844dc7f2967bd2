use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma function pole at {0}")]
    Pole(f64),
    #[error("degenerate Jacobi parameters n={n}, alpha={alpha}, beta={beta}")]
    Parameter { n: usize, alpha: f64, beta: f64 },
    #[error("series does not converge: {0}")]
    Divergence(String),
    #[error("point with modulus {0} lies outside the open unit disk")]
    Domain(f64),
    #[error("finite-difference step {0} outside (0, 1e-2]")]
    Step(f64),
    #[error("invalid quadrature size: {0}")]
    Size(String),
    #[error("evaluation radius {0} collides with a quadrature node ring")]
    Singularity(f64),
    #[error("insufficient data for fit: {0}")]
    Range(String),
    #[error("{0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
