use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// More than one linearly independent stationary state exists.
    #[error("steady state is degenerate (nullspace dimension {dim})")]
    DegenerateSteadyState { dim: usize },

    /// A closed-form expression is outside its domain (e.g. γ_d = 0 or η = 0).
    #[error("closed-form expression diverges: {0}")]
    Divergence(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Fixed-step integration requested with dt·‖L‖₁ ≥ 1.
    #[error("unstable time step: dt·‖L‖₁ = {0:.3} (must be < 1)")]
    Stability(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Dimension(_) | Error::Io(_))
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
