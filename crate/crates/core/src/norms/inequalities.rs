use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lorentz::{lorentz_quasinorm, LorentzParams};
use super::weighted::morrey_estimate;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{check_same_grid, gradient, ScalarField, SpectralScalarField};

/// Exponents of `‖f∗g‖_{L^{p,q}} ≤ C‖f‖_{L^{p1,q1}}‖g‖_{L^{p2,q2}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungExponents<T = f64> {
    pub p: T,
    pub q: T,
    pub p1: T,
    pub q1: T,
    pub p2: T,
    pub q2: T,
}

impl<T: Real> YoungExponents<T> {
    /// All second indices equal to the first.
    pub fn diagonal(p: T, p1: T, p2: T) -> Self {
        Self { p, q: p, p1, q1: p1, p2, q2: p2 }
    }

    pub fn validate(&self) -> Result<()> {
        let one = T::one();
        let tol = T::lit(1e-12);
        for (name, v) in [("p", self.p), ("p1", self.p1), ("p2", self.p2)] {
            if !(v > one && v.is_finite()) {
                return Err(Error::InvalidExponents(format!("{name} = {v} must lie in (1, ∞)")));
            }
        }
        for (name, v) in [("q", self.q), ("q1", self.q1), ("q2", self.q2)] {
            if !(v >= one) {
                return Err(Error::InvalidExponents(format!("{name} = {v} must be >= 1")));
            }
        }
        let gap = one + one / self.p - one / self.p1 - one / self.p2;
        if gap.abs() > tol {
            return Err(Error::InvalidExponents(format!(
                "1 + 1/p − 1/p1 − 1/p2 = {gap:e}, expected 0"
            )));
        }
        if one / self.q > one / self.q1 + one / self.q2 + tol {
            return Err(Error::InvalidExponents("1/q exceeds 1/q1 + 1/q2".into()));
        }
        Ok(())
    }
}

/// Norms entering one Young measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungMeasurement<T = f64> {
    pub ratio: T,
    pub convolution_norm: T,
    pub f_norm: T,
    pub g_norm: T,
}

/// Periodic convolution `∫ f(y) g(x − y) dy`, computed spectrally.
pub fn convolve<T: Real>(f: &ScalarField<T>, g: &ScalarField<T>) -> Result<ScalarField<T>> {
    check_same_grid(&f.grid, &g.grid)?;
    let a = f.to_spectral();
    let b = g.to_spectral();
    let vol = f.grid.volume();
    let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y * vol).collect();
    Ok(SpectralScalarField { grid: f.grid, coeffs }.to_physical())
}

/// Measures `‖f∗g‖_{p,q} / (‖f‖_{p1,q1}‖g‖_{p2,q2})`.
pub fn young_check<T: Real>(
    f: &ScalarField<T>,
    g: &ScalarField<T>,
    ex: &YoungExponents<T>,
) -> Result<YoungMeasurement<T>> {
    ex.validate()?;
    let conv = convolve(f, g)?;
    let convolution_norm = lorentz_quasinorm(&conv, &LorentzParams::new(ex.p, ex.q)?);
    let f_norm = lorentz_quasinorm(f, &LorentzParams::new(ex.p1, ex.q1)?);
    let g_norm = lorentz_quasinorm(g, &LorentzParams::new(ex.p2, ex.q2)?);
    if f_norm == T::zero() || g_norm == T::zero() {
        return Err(Error::DegenerateInput("zero factor in Young check".into()));
    }
    Ok(YoungMeasurement {
        ratio: convolution_norm / (f_norm * g_norm),
        convolution_norm,
        f_norm,
        g_norm,
    })
}

/// Outcome of the Morrey–Hölder comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderCheck<T = f64> {
    /// `sup |f(x) − f(y)| / (‖∇f‖_{Ṁ^{1,p}} |x − y|^{1−3/p})` over the sampled pairs.
    pub ratio: T,
    pub gradient_norm: T,
    pub pairs: usize,
}

/// Samples point pairs and compares increments with the Morrey norm of the gradient.
pub fn holder_modulus_check<T: Real>(
    f: &ScalarField<T>,
    p: T,
    pairs: usize,
    seed: u64,
) -> Result<HolderCheck<T>> {
    if !(p > T::lit(3.0)) {
        return Err(Error::InvalidParameter(format!("Hölder check needs p > 3, got {p}")));
    }
    let g = f.grid;
    let grad = gradient(&f.to_spectral()).to_physical();
    let h = g.spacing();
    let quarter = g.box_length() / T::lit(4.0);
    let mut radii = Vec::new();
    let mut r = h * T::lit(1.5);
    while r <= quarter {
        radii.push(r);
        r = r * T::lit(2.0);
    }
    radii.push(quarter);
    let stride = (g.n() / 4).max(1);
    let mut centers = Vec::new();
    for a in (0..g.n()).step_by(stride) {
        for b in (0..g.n()).step_by(stride) {
            for c in (0..g.n()).step_by(stride) {
                centers.push(g.position(g.index(a, b, c)));
            }
        }
    }
    let gnorm = morrey_estimate(&grad, 1, p, &radii, &centers)?.value;
    let scale = f.max_abs() / g.box_length();
    if !(gnorm > T::lit(1e-12) * scale) || gnorm == T::zero() {
        return Err(Error::DegenerateInput("gradient has zero Morrey norm".into()));
    }
    let expo = T::one() - T::lit(3.0) / p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut ratio = T::zero();
    for s in 0..pairs {
        let x = rng.gen_range(0..g.len());
        let y = if s % 2 == 0 {
            rng.gen_range(0..g.len())
        } else {
            let (i, j, k) = g.unravel(x);
            let d = |c: usize, rng: &mut ChaCha8Rng| (c + n + rng.gen_range(0..7usize) - 3) % n;
            let (a, b, c) = (d(i, &mut rng), d(j, &mut rng), d(k, &mut rng));
            g.index(a, b, c)
        };
        if x == y {
            continue;
        }
        let dist = g.periodic_distance(g.position(x), g.position(y));
        let inc = (f.values[x] - f.values[y]).abs();
        ratio = ratio.max(inc / (gnorm * dist.powf(expo)));
    }
    Ok(HolderCheck {
        ratio,
        gradient_norm: gnorm,
        pairs,
    })
}
