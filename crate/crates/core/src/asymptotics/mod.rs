//! Far-field analysis: the real-space kernel, profile decomposition and decay fits,
//! moment-matrix certificates and the localized energy balance.

mod certificate;
mod kernel;
mod liouville;
mod profile;

pub use certificate::{
    bv_polynomial, bv_scalar_test, certificate_for_moments, direct_scalar_test, nonexistence_certificate,
    CertificateFloors, NonexistenceCertificate,
};
pub use kernel::{
    build_kernel, build_kernel_with, contract, sphere_points, HomogeneousKernel, Tensor3, DEFAULT_KERNEL_GRID,
    DEFAULT_SPHERE_SAMPLES,
};
pub use liouville::{caccioppoli_energy, cutoff, CaccioppoliRecord};
pub use profile::{
    default_window, fit_decay_exponent, periodic_term, profile_decomposition, profile_term, Decomposition,
    ProfileOptions, ProfileTerm, RadialProfile, ShellStatistic,
};
