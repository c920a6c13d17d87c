//! Pseudo-spectral solver and diagnostics for the stationary fractional
//! Navier–Stokes system `(−Δ)^{α/2}u + ℙ(u·∇)u = ℙf` on a periodic box.
//!
//! The numerical core is generic over the scalar type (see [`Real`]); the
//! aliases below fix it to `f64`, which is what the diagnostics and the
//! experiment driver use.

mod error;
mod scalar;

pub mod asymptotics;
pub mod evolver;
pub mod forces;
pub mod norms;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = spectral::Grid<f64>;
pub type ScalarField = spectral::ScalarField<f64>;
pub type SpectralScalarField = spectral::SpectralScalarField<f64>;
pub type RealVectorField = spectral::RealVectorField<f64>;
pub type SpectralVectorField = spectral::SpectralVectorField<f64>;
pub type FracParams = spectral::FracParams<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SteadySolution = solver::SteadySolution<f64>;
pub type MomentMatrix = forces::MomentMatrix<f64>;

pub type GridF32 = spectral::Grid<f32>;
pub type RealVectorFieldF32 = spectral::RealVectorField<f32>;
pub type SpectralVectorFieldF32 = spectral::SpectralVectorField<f32>;
