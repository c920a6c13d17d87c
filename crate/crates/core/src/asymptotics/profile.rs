use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::kernel::{low_pass, HomogeneousKernel};
use crate::error::{Error, Result};
use crate::forces::MomentMatrix;
use crate::norms::Sampled;
use crate::spectral::{check_same_grid, projector, Grid, RealVectorField, SpectralVectorField};

/// How a shell of grid points is reduced to one value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellStatistic {
    /// Largest value; the bin center is the radius where it is attained.
    #[default]
    Max,
    /// Arithmetic mean; the bin center is the geometric mean radius.
    Mean,
    /// Geometric mean; the bin center is the geometric mean radius.
    LogMean,
}

/// Binning of a radial profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub statistic: ShellStatistic,
}

fn default_bins() -> usize {
    12
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            bins: default_bins(),
            statistic: ShellStatistic::Max,
        }
    }
}

/// Default far-field window `(0.125 L, 0.24 L)`.
pub fn default_window(grid: &Grid<f64>) -> (f64, f64) {
    let l = grid.box_length();
    (0.125 * l, 0.24 * l)
}

/// Shell statistics of `|field|` over logarithmic bins, with a power-law fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub bin_centers: Vec<f64>,
    pub bin_values: Vec<f64>,
    pub bin_counts: Vec<usize>,
    pub window: (f64, f64),
    pub statistic: ShellStatistic,
    /// Negated slope of `log value` against `log radius`.
    pub fitted_exponent: f64,
    pub fit_stderr: f64,
    /// Prefactor `C` of the fitted law `C r^{−exponent}`.
    pub fit_prefactor: f64,
}

impl RadialProfile {
    /// Value of the fitted law at `r`.
    pub fn fitted_value(&self, r: f64) -> f64 {
        self.fit_prefactor * r.powf(-self.fitted_exponent)
    }
}

fn check_window(grid: &Grid<f64>, window: (f64, f64), bins: usize) -> Result<()> {
    let (lo, hi) = window;
    let quarter = grid.box_length() / 4.0;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidRadius(format!("window ({lo}, {hi}) must satisfy 0 < r_min < r_max")));
    }
    if hi > quarter * (1.0 + 1e-12) {
        return Err(Error::InvalidRadius(format!("window end {hi} exceeds L/4 = {quarter}")));
    }
    if bins < 8 {
        return Err(Error::InvalidParameter(format!("a decay fit needs at least 8 bins, got {bins}")));
    }
    Ok(())
}

/// Least-squares slope, intercept and slope standard error.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

/// Bins `|field|` over logarithmic shells of the window around the origin and fits
/// `log value` against `log radius`.
pub fn fit_decay_exponent<F: Sampled<f64> + ?Sized>(
    field: &F,
    window: (f64, f64),
    options: &ProfileOptions,
) -> Result<RadialProfile> {
    let g = *field.grid();
    check_window(&g, window, options.bins)?;
    let (lo, hi) = window;
    let bins = options.bins;
    let log_lo = lo.ln();
    let log_step = (hi.ln() - log_lo) / bins as f64;
    let mags = field.magnitudes();

    let mut count = vec![0usize; bins];
    let mut best = vec![(f64::NEG_INFINITY, 0.0); bins];
    let mut sum = vec![0.0; bins];
    let mut log_sum = vec![0.0; bins];
    let mut log_r = vec![0.0; bins];
    let mut nonpositive = vec![false; bins];
    for (flat, &v) in mags.iter().enumerate() {
        let x = g.position(flat);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r < lo || r >= hi {
            continue;
        }
        let b = (((r.ln() - log_lo) / log_step) as usize).min(bins - 1);
        count[b] += 1;
        if v > best[b].0 || (v == best[b].0 && r < best[b].1) {
            best[b] = (v, r);
        }
        sum[b] += v;
        log_r[b] += r.ln();
        if v > 0.0 {
            log_sum[b] += v.ln();
        } else {
            nonpositive[b] = true;
        }
    }

    let mut centers = Vec::with_capacity(bins);
    let mut values = Vec::with_capacity(bins);
    for b in 0..bins {
        if count[b] == 0 {
            return Err(Error::EmptyShell(format!("bin {b} of the window ({lo}, {hi}) holds no grid point")));
        }
        let c = count[b] as f64;
        let (center, value) = match options.statistic {
            ShellStatistic::Max => (best[b].1, best[b].0),
            ShellStatistic::Mean => ((log_r[b] / c).exp(), sum[b] / c),
            ShellStatistic::LogMean => {
                if nonpositive[b] {
                    return Err(Error::EmptyShell(format!("bin {b} contains a zero value")));
                }
                ((log_r[b] / c).exp(), (log_sum[b] / c).exp())
            }
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::EmptyShell(format!("bin {b} has nonpositive value {value}")));
        }
        centers.push(center);
        values.push(value);
    }
    let lx: Vec<f64> = centers.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, stderr) = linear_fit(&lx, &ly);
    Ok(RadialProfile {
        bin_centers: centers,
        bin_values: values,
        bin_counts: count,
        window,
        statistic: options.statistic,
        fitted_exponent: -slope,
        fit_stderr: stderr,
        fit_prefactor: intercept.exp(),
    })
}

/// Which realization of `m_α:M` is subtracted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileTerm {
    /// The box-periodic kernel, contracted in frequency space.
    #[default]
    Periodic,
    /// The homogeneous free-space kernel evaluated pointwise.
    FreeSpace,
}

/// `x ↦ m_α(x):M` sampled on `grid`.
pub fn profile_term(
    grid: &Grid<f64>,
    moments: &MomentMatrix<f64>,
    kernel: &HomogeneousKernel,
    term: ProfileTerm,
) -> RealVectorField<f64> {
    match term {
        ProfileTerm::FreeSpace => free_space_term(grid, moments, kernel),
        ProfileTerm::Periodic => periodic_term(grid, moments, kernel.alpha).to_physical(),
    }
}

fn free_space_term(grid: &Grid<f64>, moments: &MomentMatrix<f64>, kernel: &HomogeneousKernel) -> RealVectorField<f64> {
    let coef = kernel.contracted_coefficients(&moments.entries);
    let exps = kernel.exponents();
    let degree = kernel.degree;
    let mut out = RealVectorField::zeros(*grid);
    for flat in 1..grid.len() {
        let x = grid.position(flat);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let w = [x[0] / r, x[1] / r, x[2] / r];
        let pw: [[f64; 6]; 3] = [0, 1, 2].map(|d| {
            let mut p = [1.0; 6];
            for e in 1..6 {
                p[e] = p[e - 1] * w[d];
            }
            p
        });
        let s = r.powf(degree);
        for i in 0..3 {
            let v: f64 = exps
                .iter()
                .zip(&coef[i])
                .map(|(e, c)| c * pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize])
                .sum();
            out.components[i][flat] = v * s;
        }
    }
    out
}

/// Coefficients `m̂(ξ):M · φ(ε|ξ|)/L³` of the periodic profile term, `ε = 1.5h`.
pub fn periodic_term(grid: &Grid<f64>, moments: &MomentMatrix<f64>, alpha: f64) -> SpectralVectorField<f64> {
    let g = *grid;
    let eps = 1.5 * g.spacing();
    let m = &moments.entries;
    let vol = g.volume();
    let mut out = SpectralVectorField::zeros(g);
    for flat in 1..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let xi = g.wavevector(flat);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let scale = r2.powf(-alpha / 2.0) * low_pass(eps * eps * r2) / vol;
        let mxi = [0, 1, 2].map(|j| m[j][0] * xi[0] + m[j][1] * xi[1] + m[j][2] * xi[2]);
        let p = projector(xi);
        for i in 0..3 {
            let v = p[i][0] * mxi[0] + p[i][1] * mxi[1] + p[i][2] * mxi[2];
            out.components[i][flat] = Complex::new(0.0, -v * scale);
        }
    }
    out
}

/// The remainder `u − u₀ − m_α:M` and its radial profile.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub remainder: RealVectorField<f64>,
    pub profile: RadialProfile,
}

/// Splits `u` into the lift `u₀`, the profile term `m_α:M` and a remainder, and fits the
/// decay of the remainder over `window`.
pub fn profile_decomposition(
    u: &SpectralVectorField<f64>,
    u0: &SpectralVectorField<f64>,
    moments: &MomentMatrix<f64>,
    kernel: &HomogeneousKernel,
    window: (f64, f64),
    term: ProfileTerm,
    options: &ProfileOptions,
) -> Result<Decomposition> {
    check_same_grid(&u.grid, &u0.grid)?;
    let g = u.grid;
    let remainder = match term {
        ProfileTerm::Periodic => u
            .sub(u0)?
            .sub(&periodic_term(&g, moments, kernel.alpha))?
            .to_physical(),
        ProfileTerm::FreeSpace => u.sub(u0)?.to_physical().sub(&free_space_term(&g, moments, kernel))?,
    };
    let profile = fit_decay_exponent(&remainder, window, options)?;
    Ok(Decomposition { remainder, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ScalarField;

    #[test]
    fn exact_power_law_with_shell_max() {
        let g = Grid::<f64>::new(64, 64.0).unwrap();
        let f = ScalarField::from_fn(g, |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r == 0.0 {
                0.0
            } else {
                r.powi(-3)
            }
        });
        let p = fit_decay_exponent(&f, (3.0, 16.0), &ProfileOptions::default()).unwrap();
        assert!((p.fitted_exponent - 3.0).abs() < 1e-3, "{}", p.fitted_exponent);
        assert!(p.fit_stderr < 1e-3);
        assert!(p.bin_centers.windows(2).all(|w| w[0] < w[1]));
        assert!((p.fitted_value(5.0) - 5f64.powi(-3)).abs() < 1e-3 * 5f64.powi(-3));
    }

    #[test]
    fn shifted_power_law_in_the_far_field() {
        let g = Grid::<f64>::new(64, 6400.0).unwrap();
        let f = ScalarField::from_fn(g, |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            (1.0 + r).powf(-2.5)
        });
        for statistic in [ShellStatistic::Max, ShellStatistic::Mean, ShellStatistic::LogMean] {
            let opts = ProfileOptions { bins: 10, statistic };
            let p = fit_decay_exponent(&f, (640.0, 1600.0), &opts).unwrap();
            assert!((p.fitted_exponent - 2.5).abs() < 0.05, "{statistic:?}: {}", p.fitted_exponent);
        }
    }

    #[test]
    fn window_and_shell_errors() {
        let g = Grid::<f64>::new(32, 32.0).unwrap();
        let zero = ScalarField::zeros(g);
        let opts = ProfileOptions::default();
        assert!(matches!(fit_decay_exponent(&zero, (2.0, 8.0), &opts), Err(Error::EmptyShell(_))));
        assert!(matches!(fit_decay_exponent(&zero, (2.0, 9.0), &opts), Err(Error::InvalidRadius(_))));
        assert!(matches!(fit_decay_exponent(&zero, (0.0, 8.0), &opts), Err(Error::InvalidRadius(_))));
        let few = ProfileOptions { bins: 7, ..opts };
        assert!(matches!(fit_decay_exponent(&zero, (2.0, 8.0), &few), Err(Error::InvalidParameter(_))));
        // shells thinner than the lattice spacing are empty
        let fine = ProfileOptions { bins: 400, ..opts };
        let one = ScalarField::from_fn(g, |_| 1.0);
        assert!(matches!(fit_decay_exponent(&one, (2.0, 8.0), &fine), Err(Error::EmptyShell(_))));
    }
}
