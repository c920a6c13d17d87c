//! Periodic grids, transforms, and the Fourier multipliers every other layer is built on.

mod bilinear;
pub mod fft;
mod field;
mod grid;
mod ops;

pub use bilinear::{
    advection_from_products, advection_term, apply_bilinear, bilinear_from_physical, bilinear_symbol,
    dealias_products, pair_index, tensor_products, PAIRS,
};
pub use field::{RealVectorField, ScalarField, SpectralScalarField, SpectralVectorField};
pub(crate) use field::{check_same_grid, czero};
pub use grid::Grid;
pub use ops::{
    curl, dealias, divergence, fractional_power, fractional_power_scalar, gradient, leray_project,
    projector, semigroup_multiply, semigroup_multiply_scalar, FracParams,
};
pub(crate) use ops::validate_kernel_alpha;
