use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The weight fails `∫₀ g(s)/s ds < ∞`, so single Cauchy kernels have infinite norm.
    #[error("divergent kernel: {0}")]
    Divergence(String),

    #[error("evaluation at (or within {distance:e} of) a pole")]
    PoleEvaluation { distance: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no start converged within {iterations} iterations (best gradient norm {best_gradient:e})")]
    Convergence {
        iterations: usize,
        best_gradient: f64,
        trace: Vec<f64>,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("W_N is not monotone: N = {n} must exceed 2M = {two_m}")]
    Monotonicity { n: usize, two_m: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
