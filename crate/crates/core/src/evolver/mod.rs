//! Time-dependent problem.

mod checks;
mod mild;

pub use checks::{
    drift_from, kernel_l1_check, smoothing_check, stationarity_check, vector_smoothing_check,
    KernelL1Row, SmoothingReport, StationarityReport,
};
pub use mild::{evolve_mild, evolve_mild_with, stability_bound, StateStorage, Trajectory};
