use num_complex::Complex;
use serde::Serialize;

use super::mild::{evolve_mild_observed, StateStorage};
use crate::error::{Error, Result};
use crate::norms::lebesgue_norm;
use crate::solver::SteadySolution;
use crate::spectral::{
    fft, projector, semigroup_multiply, semigroup_multiply_scalar, FracParams, Grid, RealVectorField, ScalarField,
    SpectralVectorField, PAIRS,
};

/// Distance of an evolved steady state from itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub times: Vec<f64>,
    /// `‖v(t) − u‖₂ / ‖u‖₂` per step.
    pub drift_history: Vec<f64>,
    pub max_drift: f64,
}

/// Evolves `v₀ = u` under the force `f` and records its drift from `u`.
pub fn stationarity_check(
    solution: &SteadySolution<f64>,
    f: &SpectralVectorField<f64>,
    params: &FracParams<f64>,
    t_end: f64,
    dt: f64,
) -> Result<StationarityReport> {
    drift_from(&solution.velocity, &solution.velocity, f, params, t_end, dt)
}

/// Drift of the evolution started at `v0`, measured against `target`.
pub fn drift_from(
    target: &SpectralVectorField<f64>,
    v0: &SpectralVectorField<f64>,
    f: &SpectralVectorField<f64>,
    params: &FracParams<f64>,
    t_end: f64,
    dt: f64,
) -> Result<StationarityReport> {
    let scale = target.l2_norm();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut drift = Vec::new();
    let traj = evolve_mild_observed(v0, f, params, t_end, dt, StateStorage::Endpoints, |_, v| {
        drift.push(v.sub(target)?.l2_norm() / scale);
        Ok(())
    })?;
    Ok(StationarityReport {
        max_drift: drift.iter().fold(0.0, |m: f64, &d| m.max(d)),
        times: traj.times,
        drift_history: drift,
    })
}

/// `sup_t t^{3/(αp)} ‖e^{−t(−Δ)^{α/2}} f‖_∞` against `‖f‖_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub times: Vec<f64>,
    pub weighted_sup: Vec<f64>,
    pub sup: f64,
    pub lp_norm: f64,
    pub ratio: f64,
}

fn validate_smoothing(p: f64, times: &[f64]) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0 && t <= 10.0)) {
        return Err(Error::InvalidTimeStep("smoothing times must lie in (0, 10]".into()));
    }
    Ok(())
}

fn smoothing_report(p: f64, alpha: f64, times: &[f64], lp_norm: f64, sup_at: impl Fn(f64) -> Result<f64>) -> Result<SmoothingReport> {
    let weighted = times
        .iter()
        .map(|&t| sup_at(t).map(|s| t.powf(3.0 / (alpha * p)) * s))
        .collect::<Result<Vec<_>>>()?;
    let sup = weighted.iter().fold(0.0, |m: f64, &v| m.max(v));
    Ok(SmoothingReport {
        times: times.to_vec(),
        weighted_sup: weighted,
        sup,
        lp_norm,
        ratio: if lp_norm > 0.0 { sup / lp_norm } else { 0.0 },
    })
}

/// Smoothing estimate of the semigroup on a scalar field.
pub fn smoothing_check(f: &ScalarField<f64>, p: f64, alpha: f64, times: &[f64]) -> Result<SmoothingReport> {
    validate_smoothing(p, times)?;
    let fh = f.to_spectral();
    smoothing_report(p, alpha, times, lebesgue_norm(f, p), |t| {
        Ok(semigroup_multiply_scalar(&fh, t, alpha)?.to_physical().max_abs())
    })
}

/// [`smoothing_check`] for a vector field, with `|·|` the pointwise Euclidean norm.
pub fn vector_smoothing_check(f: &RealVectorField<f64>, p: f64, alpha: f64, times: &[f64]) -> Result<SmoothingReport> {
    validate_smoothing(p, times)?;
    let fh = f.to_spectral();
    smoothing_report(p, alpha, times, lebesgue_norm(f, p), |t| {
        Ok(semigroup_multiply(&fh, t, alpha)?.to_physical().magnitude().max_abs())
    })
}

/// Scaled `L¹` norms of the kernels of `e^{−t(−Δ)^{α/2}}`, its gradient, and `e^{−t(−Δ)^{α/2}}ℙ div`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelL1Row {
    pub t: f64,
    /// `‖p_α(t,·)‖₁`.
    pub heat: f64,
    /// `t^{1/α} ‖∇p_α(t,·)‖₁`.
    pub gradient: f64,
    /// `t^{1/α} ‖K_α(t,·)‖₁`.
    pub projected: f64,
}

/// Synthesizes the kernels on `grid` by inverse transform and integrates their magnitudes.
pub fn kernel_l1_check(alpha: f64, times: &[f64], grid: &Grid<f64>) -> Result<Vec<KernelL1Row>> {
    crate::spectral::validate_kernel_alpha(alpha)?;
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidTimeStep("kernel times must be positive".into()));
    }
    let g = *grid;
    let vol = g.volume();
    let dv = g.cell_volume();
    let zero = Complex::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let decay: Vec<f64> = (0..g.len())
            .map(|flat| {
                let xi = g.wavevector(flat);
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                (-t * r.powf(alpha)).exp() / vol
            })
            .collect();
        let heat_hat: Vec<Complex<f64>> = decay.iter().map(|&d| Complex::new(d, 0.0)).collect();
        let heat: f64 = fft::inverse_real(&g, &heat_hat).iter().map(|v| v.abs()).sum::<f64>() * dv;

        // i ξ_k e^{−t|ξ|^α}, and −P_{ij} iξ_k e^{−t|ξ|^α} for the projected divergence
        let odd = |flat: usize, w: f64| -> Complex<f64> {
            if g.touches_nyquist(flat) {
                zero
            } else {
                Complex::new(0.0, w * decay[flat])
            }
        };
        let mut grad_sq = vec![0.0; g.len()];
        let comps: Vec<Vec<Complex<f64>>> = (0..3)
            .map(|k| (0..g.len()).map(|flat| odd(flat, g.wavevector(flat)[k])).collect())
            .collect();
        let (a, b) = fft::inverse_real_pair(&g, &comps[0], &comps[1]);
        let c = fft::inverse_real(&g, &comps[2]);
        for flat in 0..g.len() {
            grad_sq[flat] = a[flat] * a[flat] + b[flat] * b[flat] + c[flat] * c[flat];
        }
        drop(comps);
        let gradient: f64 = grad_sq.iter().map(|v| v.sqrt()).sum::<f64>() * dv;

        let mut k_sq = vec![0.0; g.len()];
        let entry = |flat: usize, comp: usize| -> Complex<f64> {
            if flat == 0 {
                return zero;
            }
            let (i, j) = PAIRS[comp / 3];
            let k = comp % 3;
            let xi = g.wavevector(flat);
            odd(flat, -projector(xi)[i][j] * xi[k])
        };
        for pass in 0..9 {
            let (c0, c1) = (2 * pass, 2 * pass + 1);
            let a: Vec<Complex<f64>> = (0..g.len()).map(|f| entry(f, c0)).collect();
            let b: Vec<Complex<f64>> = (0..g.len()).map(|f| entry(f, c1)).collect();
            let (ra, rb) = fft::inverse_real_pair(&g, &a, &b);
            // off-diagonal (i,j) pairs appear twice in the full tensor
            let w0 = if PAIRS[c0 / 3].0 == PAIRS[c0 / 3].1 { 1.0 } else { 2.0 };
            let w1 = if PAIRS[c1 / 3].0 == PAIRS[c1 / 3].1 { 1.0 } else { 2.0 };
            for flat in 0..g.len() {
                k_sq[flat] += w0 * ra[flat] * ra[flat] + w1 * rb[flat] * rb[flat];
            }
        }
        let projected: f64 = k_sq.iter().map(|v| v.sqrt()).sum::<f64>() * dv;
        let s = t.powf(1.0 / alpha);
        rows.push(KernelL1Row {
            t,
            heat,
            gradient: s * gradient,
            projected: s * projected,
        });
    }
    Ok(rows)
}
