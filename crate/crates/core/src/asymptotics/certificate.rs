use serde::{Deserialize, Serialize};

use super::kernel::{contract, HomogeneousKernel};
use crate::forces::{moment_matrix, MomentMatrix};
use crate::solver::SteadySolution;

/// `Qᵢ(ξ) = Σ_{jk} (|ξ|²(δ_{jk}ξᵢ + δ_{ik}ξⱼ + δ_{ij}ξₖ) − 5ξᵢξⱼξₖ) a_{jk}`.
pub fn bv_polynomial(a: &[[f64; 3]; 3], xi: [f64; 3], i: usize) -> f64 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let mut s = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            let t = r2 * (d(j, k) * xi[i] + d(i, k) * xi[j] + d(i, j) * xi[k]) - 5.0 * xi[i] * xi[j] * xi[k];
            s += t * a[j][k];
        }
    }
    s
}

fn frobenius(a: &[[f64; 3]; 3]) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

const SCALAR_TOL: f64 = 1e-9;

/// True when every `Qᵢ` vanishes, relative to `|ξ|³‖A‖_F`, on the 20³ midpoint lattice of `[−1,1]³`.
pub fn bv_scalar_test(a: &[[f64; 3]; 3]) -> bool {
    let norm = frobenius(a);
    let node = |l: usize| -1.0 + (2 * l + 1) as f64 / 20.0;
    let mut worst: f64 = 0.0;
    for p in 0..20 {
        for q in 0..20 {
            for r in 0..20 {
                let xi = [node(p), node(q), node(r)];
                let n3 = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powf(1.5);
                for i in 0..3 {
                    worst = worst.max(bv_polynomial(a, xi, i).abs() / n3);
                }
            }
        }
    }
    worst <= SCALAR_TOL * norm
}

/// `‖A − (tr A/3) I‖_F ≤ 10⁻⁹ ‖A‖_F`.
pub fn direct_scalar_test(a: &[[f64; 3]; 3]) -> bool {
    let m = MomentMatrix { entries: *a };
    m.deviatoric_norm() <= SCALAR_TOL * frobenius(a)
}

/// Thresholds above which the certificate is affirmative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFloors {
    /// Floor on `‖M − (tr M/3) I‖_F / ‖M‖_F`.
    #[serde(default = "default_floor")]
    pub deviation: f64,
    /// Floor on `min_ω |m(ω):M| / (c ‖M‖_F)`.
    #[serde(default = "default_floor")]
    pub lower_bound: f64,
}

fn default_floor() -> f64 {
    1e-6
}

impl Default for CertificateFloors {
    fn default() -> Self {
        Self {
            deviation: default_floor(),
            lower_bound: default_floor(),
        }
    }
}

/// Evidence that the leading profile term cannot vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonexistenceCertificate {
    /// `‖M − (tr M/3) I‖_F`.
    pub deviation: f64,
    pub relative_deviation: f64,
    /// `min` over the kernel sphere samples of `|m(ω):M|`.
    pub leading_lower_bound: f64,
    pub relative_lower_bound: f64,
    pub affirmative: bool,
}

/// Certificate for an arbitrary moment matrix.
pub fn certificate_for_moments(
    moments: &MomentMatrix<f64>,
    kernel: &HomogeneousKernel,
    floors: &CertificateFloors,
) -> NonexistenceCertificate {
    let norm = frobenius(&moments.entries);
    let deviation = moments.deviatoric_norm();
    let lower = kernel
        .sphere_samples
        .iter()
        .map(|m| {
            let v = contract(m, &moments.entries);
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let lower = if lower.is_finite() { lower } else { 0.0 };
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    let relative_deviation = ratio(deviation, norm);
    let relative_lower_bound = ratio(lower, kernel.bound * norm);
    NonexistenceCertificate {
        deviation,
        relative_deviation,
        leading_lower_bound: lower,
        relative_lower_bound,
        affirmative: relative_deviation > floors.deviation && relative_lower_bound > floors.lower_bound,
    }
}

/// Certificate for the moment matrix of a steady solution.
pub fn nonexistence_certificate(
    solution: &SteadySolution<f64>,
    kernel: &HomogeneousKernel,
    floors: &CertificateFloors,
) -> NonexistenceCertificate {
    let m = moment_matrix(&solution.velocity.to_physical());
    certificate_for_moments(&m, kernel, floors)
}
