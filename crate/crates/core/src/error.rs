use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("infeasible model parameters: {0}")]
    InfeasibleFamily(String),

    /// `∫G(u) ≤ 0`, so no dilation of `u` lies on the Pohozaev manifold.
    #[error("projection infeasible: G-integral {g_integral:e} is not positive")]
    ProjectionInfeasible { g_integral: f64 },

    #[error("SOR did not converge in {iterations} sweeps (residual {residual:e})")]
    SorNonConvergence { iterations: usize, residual: f64 },

    #[error("initial guess infeasible: G-integral {g_integral:e} is not positive")]
    InfeasibleGuess { g_integral: f64 },

    #[error("flat line search: no rise and no strict decrease within {steps} steps")]
    FlatLandscape { steps: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
