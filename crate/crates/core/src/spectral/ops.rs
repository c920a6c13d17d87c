use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::field::{czero, SpectralScalarField, SpectralVectorField};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fractional order and dealiasing switch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracParams<T = f64> {
    pub alpha: T,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

impl<T: Real> FracParams<T> {
    pub fn new(alpha: T, dealias: bool) -> Self {
        Self { alpha, dealias }
    }

    /// Range accepted by the steady solver, `1 < α < 5/2`.
    pub fn validate_steady(&self) -> Result<()> {
        if self.alpha > T::one() && self.alpha < T::lit(2.5) {
            Ok(())
        } else {
            Err(Error::InvalidAlpha {
                alpha: self.alpha.as_f64(),
                range: "(1, 5/2)",
            })
        }
    }

    /// Range accepted for kernel evaluation, `1 < α < 4`.
    pub fn validate_kernel(&self) -> Result<()> {
        validate_kernel_alpha(self.alpha)
    }

    /// Exponent `3/(α−1)` of the critical Lorentz space.
    pub fn critical_exponent(&self) -> T {
        T::lit(3.0) / (self.alpha - T::one())
    }
}

pub(crate) fn validate_kernel_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::one() && alpha < T::lit(4.0) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            range: "(1, 4)",
        })
    }
}

/// Leray projector `I − ξξᵀ/|ξ|²` at a nonzero wavevector.
#[inline]
pub fn projector<T: Real>(xi: [T; 3]) -> [[T; 3]; 3] {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let mut p = [[T::zero(); 3]; 3];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let delta = if i == j { T::one() } else { T::zero() };
            *v = delta - xi[i] * xi[j] / r2;
        }
    }
    p
}

/// Applies a per-mode scalar multiplier `m(flat, |ξ|)` to every component.
pub(crate) fn radial_multiply<T: Real>(
    v: &SpectralVectorField<T>,
    mut m: impl FnMut(usize, T) -> T,
) -> SpectralVectorField<T> {
    let g = v.grid;
    let mut out = v.clone();
    for flat in 0..g.len() {
        let xi = g.wavevector(flat);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let s = m(flat, r);
        for c in out.components.iter_mut() {
            c[flat] = c[flat] * s;
        }
    }
    out
}

/// Leray projection; Nyquist-plane coefficients are zeroed and the zero mode passes through.
pub fn leray_project<T: Real>(v: &SpectralVectorField<T>) -> SpectralVectorField<T> {
    let g = v.grid;
    let mut out = v.clone();
    for flat in 1..g.len() {
        if g.touches_nyquist(flat) {
            for c in out.components.iter_mut() {
                c[flat] = czero();
            }
            continue;
        }
        let p = projector(g.wavevector(flat));
        let w = [
            v.components[0][flat],
            v.components[1][flat],
            v.components[2][flat],
        ];
        for (i, c) in out.components.iter_mut().enumerate() {
            c[flat] = w[0] * p[i][0] + w[1] * p[i][1] + w[2] * p[i][2];
        }
    }
    out
}

/// Multiplies each coefficient by `|ξ|^β`; the zero mode maps to 0.
pub fn fractional_power<T: Real>(v: &SpectralVectorField<T>, beta: T) -> Result<SpectralVectorField<T>> {
    if beta < T::zero() {
        let scale = v.max_coefficient();
        let z = v.zero_mode();
        if z.iter().any(|c| c.norm() > T::lit(1e-13) * scale) {
            return Err(Error::ZeroModeUndefined);
        }
    }
    if beta == T::zero() {
        return Ok(v.clone());
    }
    Ok(radial_multiply(v, |flat, r| if flat == 0 { T::zero() } else { r.powf(beta) }))
}

/// Scalar version of [`fractional_power`].
pub fn fractional_power_scalar<T: Real>(
    v: &SpectralScalarField<T>,
    beta: T,
) -> Result<SpectralScalarField<T>> {
    if beta < T::zero() && v.coeffs[0].norm() > T::lit(1e-13) * v.max_coefficient() {
        return Err(Error::ZeroModeUndefined);
    }
    if beta == T::zero() {
        return Ok(v.clone());
    }
    let g = v.grid;
    let mut out = v.clone();
    out.coeffs[0] = czero();
    for flat in 1..g.len() {
        let xi = g.wavevector(flat);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        out.coeffs[flat] = out.coeffs[flat] * r.powf(beta);
    }
    Ok(out)
}

/// Heat-type semigroup `e^{−t|ξ|^α}`; the zero mode is preserved.
pub fn semigroup_multiply<T: Real>(
    v: &SpectralVectorField<T>,
    t: T,
    alpha: T,
) -> Result<SpectralVectorField<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidTimeStep(format!("semigroup time must be >= 0, got {t}")));
    }
    if t == T::zero() {
        return Ok(v.clone());
    }
    Ok(radial_multiply(v, |_, r| (-t * r.powf(alpha)).exp()))
}

/// Scalar version of [`semigroup_multiply`].
pub fn semigroup_multiply_scalar<T: Real>(
    v: &SpectralScalarField<T>,
    t: T,
    alpha: T,
) -> Result<SpectralScalarField<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidTimeStep(format!("semigroup time must be >= 0, got {t}")));
    }
    let g = v.grid;
    let mut out = v.clone();
    for flat in 1..g.len() {
        let xi = g.wavevector(flat);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        out.coeffs[flat] = out.coeffs[flat] * (-t * r.powf(alpha)).exp();
    }
    Ok(out)
}

/// Zeroes every coefficient outside the 2/3-rule sphere.
pub fn dealias<T: Real>(v: &SpectralVectorField<T>) -> SpectralVectorField<T> {
    let mut out = v.clone();
    dealias_in_place(&v.grid, &mut out.components);
    out
}

pub(crate) fn dealias_in_place<T: Real>(g: &Grid<T>, comps: &mut [Vec<Complex<T>>]) {
    for flat in 0..g.len() {
        if !g.in_dealias_sphere(flat) {
            for c in comps.iter_mut() {
                c[flat] = czero();
            }
        }
    }
}

/// Spectral divergence `iξ·v̂`.
pub fn divergence<T: Real>(v: &SpectralVectorField<T>) -> SpectralScalarField<T> {
    let g = v.grid;
    let f = g.axis_frequencies();
    let mut out = SpectralScalarField::zeros(g);
    for flat in 0..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let (i, j, k) = g.unravel(flat);
        let d = v.components[0][flat] * f[i] + v.components[1][flat] * f[j] + v.components[2][flat] * f[k];
        out.coeffs[flat] = Complex::new(-d.im, d.re);
    }
    out
}

/// Spectral gradient `iξ p̂`.
pub fn gradient<T: Real>(p: &SpectralScalarField<T>) -> SpectralVectorField<T> {
    let g = p.grid;
    let f = g.axis_frequencies();
    let mut out = SpectralVectorField::zeros(g);
    for flat in 0..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let (i, j, k) = g.unravel(flat);
        let c = p.coeffs[flat];
        let ic = Complex::new(-c.im, c.re);
        out.components[0][flat] = ic * f[i];
        out.components[1][flat] = ic * f[j];
        out.components[2][flat] = ic * f[k];
    }
    out
}

/// Spectral curl `iξ × v̂`.
pub fn curl<T: Real>(v: &SpectralVectorField<T>) -> SpectralVectorField<T> {
    let g = v.grid;
    let f = g.axis_frequencies();
    let mut out = SpectralVectorField::zeros(g);
    for flat in 0..g.len() {
        if g.touches_nyquist(flat) {
            continue;
        }
        let (i, j, k) = g.unravel(flat);
        let xi = [f[i], f[j], f[k]];
        let w = [
            v.components[0][flat],
            v.components[1][flat],
            v.components[2][flat],
        ];
        let cross = [
            w[2] * xi[1] - w[1] * xi[2],
            w[0] * xi[2] - w[2] * xi[0],
            w[1] * xi[0] - w[0] * xi[1],
        ];
        for (c, x) in out.components.iter_mut().zip(cross) {
            c[flat] = Complex::new(-x.im, x.re);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{RealVectorField, ScalarField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spectral(n: usize, l: f64, seed: u64) -> SpectralVectorField<f64> {
        let g = Grid::<f64>::new(n, l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = RealVectorField::zeros(g);
        f.components
            .iter_mut()
            .flatten()
            .for_each(|v| *v = rng.gen_range(-1.0..1.0));
        let mut s = f.to_spectral();
        for c in s.components.iter_mut() {
            c[0] = czero();
        }
        s
    }

    fn max_diff(a: &SpectralVectorField<f64>, b: &SpectralVectorField<f64>) -> f64 {
        a.sub(b).unwrap().max_coefficient()
    }

    #[test]
    fn projector_annihilates_gradients() {
        let g = Grid::<f64>::new(16, 3.0).unwrap();
        let phi = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp());
        let grad = gradient(&phi.to_spectral());
        let p = leray_project(&grad);
        assert!(p.max_coefficient() < 1e-15 * grad.max_coefficient().max(1.0));
    }

    #[test]
    fn projector_fixes_divergence_free_fields() {
        let v = leray_project(&random_spectral(16, 2.0, 1));
        let w = curl(&v);
        let pw = leray_project(&w);
        assert!(max_diff(&pw, &w) < 1e-12 * w.max_coefficient());
        assert!(w.max_divergence() < 1e-12 * w.max_coefficient());
    }

    #[test]
    fn projection_is_idempotent() {
        let v = random_spectral(16, 5.0, 2);
        let once = leray_project(&v);
        let twice = leray_project(&once);
        assert!(max_diff(&once, &twice) < 1e-12);
        assert!(once.max_divergence() < 1e-12 * once.max_coefficient());
    }

    #[test]
    fn projection_is_self_adjoint() {
        let u = random_spectral(16, 5.0, 3);
        let v = random_spectral(16, 5.0, 4);
        let a = leray_project(&u).inner(&v).unwrap();
        let b = u.inner(&leray_project(&v)).unwrap();
        assert!((a - b).abs() < 1e-10 * u.l2_norm() * v.l2_norm());
    }

    #[test]
    fn plane_wave_power() {
        let g = Grid::<f64>::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let v = RealVectorField::from_fn(g, |x| [(x[0] + x[1]).cos(), 0.0, 0.0]).to_spectral();
        let w = fractional_power(&v, 2.0).unwrap();
        let expect = v.scaled(2.0);
        assert!(max_diff(&w, &expect) < 1e-14);
        assert_eq!(fractional_power(&v, 0.0).unwrap(), v);
    }

    #[test]
    fn fractional_powers_compose() {
        let v = random_spectral(16, 3.0, 5);
        let ab = fractional_power(&fractional_power(&v, 0.7).unwrap(), -1.9).unwrap();
        let direct = fractional_power(&v, -1.2).unwrap();
        assert!(max_diff(&ab, &direct) < 1e-12 * direct.max_coefficient().max(1.0));
    }

    #[test]
    fn negative_power_needs_mean_free_input() {
        let g = Grid::<f64>::new(8, 1.0).unwrap();
        let v = RealVectorField::from_fn(g, |_| [1.0, 0.0, 0.0]).to_spectral();
        assert_eq!(fractional_power(&v, -1.0), Err(Error::ZeroModeUndefined));
        assert!(fractional_power(&v, 1.0).is_ok());
    }

    #[test]
    fn semigroup_property_and_plane_wave_decay() {
        let v = random_spectral(16, 4.0, 6);
        let a = semigroup_multiply(&semigroup_multiply(&v, 0.03, 1.5).unwrap(), 0.05, 1.5).unwrap();
        let b = semigroup_multiply(&v, 0.08, 1.5).unwrap();
        assert!(max_diff(&a, &b) < 1e-13 * b.max_coefficient());
        assert_eq!(semigroup_multiply(&v, 0.0, 1.5).unwrap(), v);

        let g = Grid::<f64>::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let w = RealVectorField::from_fn(g, |x| [0.0, (2.0 * x[0]).sin(), 0.0]).to_spectral();
        let e = semigroup_multiply(&w, 0.1, 1.5).unwrap();
        let factor = (-0.1 * 2f64.powf(1.5)).exp();
        assert!(max_diff(&e, &w.scaled(factor)) < 1e-15);
    }

    #[test]
    fn dealias_keeps_only_the_inner_sphere() {
        let v = dealias(&random_spectral(12, 1.0, 7));
        let g = v.grid;
        for flat in 0..g.len() {
            let [a, b, c] = g.integer_wavevector(flat);
            if 9 * (a * a + b * b + c * c) >= 144 {
                assert_eq!(v.components[0][flat], czero());
            }
        }
    }
}
