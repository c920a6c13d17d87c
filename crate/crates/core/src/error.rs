use thiserror::Error;

/// Errors raised by the spectral, solver and diagnostic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("negative fractional power applied to a field with nonzero mean")]
    ZeroModeUndefined,
    #[error("non-finite values produced: {0}")]
    NumericalBlowup(String),
    #[error("alpha = {alpha} outside the admissible range {range}")]
    InvalidAlpha { alpha: f64, range: &'static str },
    #[error("Picard iteration diverged after {iterations} iterations (norm ratio {ratio:.3e})")]
    Diverged { iterations: usize, ratio: f64 },
    #[error("Picard iteration not converged after {iterations} iterations (last change {last_change:.3e})")]
    NotConverged { iterations: usize, last_change: f64 },
    #[error("exponents violate the Young relation: {0}")]
    InvalidExponents(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("annulus contains no admissible lattice modes: {0}")]
    InvalidAnnulus(String),
    #[error("lifted moment matrix is scalar for every tried seed (deviation {deviation:.3e})")]
    ScalarMomentMatrix { deviation: f64 },
    #[error("radial profile has empty or nonpositive shells: {0}")]
    EmptyShell(String),
    #[error("invalid radius: {0}")]
    InvalidRadius(String),
    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable variant name, used in run reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GridMismatch => "GridMismatch",
            Error::ZeroModeUndefined => "ZeroModeUndefined",
            Error::NumericalBlowup(_) => "NumericalBlowup",
            Error::InvalidAlpha { .. } => "InvalidAlpha",
            Error::Diverged { .. } => "Diverged",
            Error::NotConverged { .. } => "NotConverged",
            Error::InvalidExponents(_) => "InvalidExponents",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::InvalidAnnulus(_) => "InvalidAnnulus",
            Error::ScalarMomentMatrix { .. } => "ScalarMomentMatrix",
            Error::EmptyShell(_) => "EmptyShell",
            Error::InvalidRadius(_) => "InvalidRadius",
            Error::InvalidTimeStep(_) => "InvalidTimeStep",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
