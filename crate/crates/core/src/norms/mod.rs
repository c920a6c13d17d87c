//! Discrete estimators of Lorentz, weighted-sup and Morrey norms, plus empirical
//! checks of the Young and Hölder-type inequalities.

mod inequalities;
mod lorentz;
mod weighted;

pub use inequalities::{convolve, holder_modulus_check, young_check, HolderCheck, YoungExponents, YoungMeasurement};
pub use lorentz::{
    distribution_function, lebesgue_norm, lorentz_quasinorm, rearrangement, LorentzParams,
    RearrangementTable,
};
pub use weighted::{interpolation_bound, morrey_estimate, morrey_norm, weighted_sup_norm, MorreyEstimate};

use crate::scalar::Real;
use crate::spectral::{Grid, RealVectorField, ScalarField};

/// Anything with a grid and pointwise magnitudes.
pub trait Sampled<T: Real> {
    fn grid(&self) -> &Grid<T>;
    /// `|f(x)|` at every grid point, in storage order.
    fn magnitudes(&self) -> Vec<T>;
}

impl<T: Real> Sampled<T> for ScalarField<T> {
    fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|v| v.abs()).collect()
    }
}

impl<T: Real> Sampled<T> for RealVectorField<T> {
    fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    fn magnitudes(&self) -> Vec<T> {
        self.magnitude().values
    }
}

