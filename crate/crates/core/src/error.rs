use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value in component {component} at lattice point {point}")]
    NonFinite { component: usize, point: usize },

    #[error("metric is not Riemannian: smallest eigenvalue {min_eigenvalue:e} at lattice point {point}")]
    NonRiemannian { point: usize, min_eigenvalue: f64 },

    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),

    #[error("Helmholtz shift must be positive, got C = {0}")]
    NonPositiveC(f64),

    #[error(
        "linearized symbol degenerates for kappa = {kappa}, lambda = {lambda} at xi = {xi:?} \
         (conformal eigenvalue {alpha:e}, traceless eigenvalue {beta:e})"
    )]
    SymbolDegenerate {
        kappa: f64,
        lambda: f64,
        xi: Vec<f64>,
        alpha: f64,
        beta: f64,
    },

    #[error("kappa = {kappa} is singular in dimension {dim} (1 + n*kappa = 0)")]
    KappaSingular { kappa: f64, dim: usize },

    #[error("lambda must be positive, got {0}")]
    LambdaNonPositive(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("field file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
