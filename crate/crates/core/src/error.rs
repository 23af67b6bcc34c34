use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("intertwining operator is singular (|det| = {det:e})")]
    SingularEta { det: f64 },

    #[error("no cyclic vector found for the Krylov intertwiner (Hamiltonian is derogatory)")]
    NoCyclicVector,

    #[error("root {index} failed to converge (relative residual {residual:e})")]
    ConvergenceFailure { index: usize, residual: f64 },

    #[error("probe frequency {omega} sits on a pole of S21")]
    PoleAtInput { omega: f64 },

    #[error("no all-real point on the ω_m line even at γ = 0")]
    NoRealRegion,

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
