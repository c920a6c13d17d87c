//! The quadratic term `B(u,u) = −(−Δ)^{−α/2} ℙ div(u⊗u)`.

use num_complex::Complex;

use super::fft;
use super::field::{czero, RealVectorField, SpectralVectorField};
use super::grid::Grid;
use super::ops::{dealias, dealias_in_place, projector, FracParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric index pairs `(j,k)` in the storage order used for `u⊗u`.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Position of `(j,k)` in [`PAIRS`].
#[inline]
pub fn pair_index(j: usize, k: usize) -> usize {
    match (j.min(k), j.max(k)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (0, 2) => 4,
        (1, 2) => 5,
        _ => panic!("component index out of range"),
    }
}

/// Symbol `m̂_{ijk}(ξ) = −(δ_{ij} − ξ_iξ_j/|ξ|²) iξ_k/|ξ|^α` (indices are 0-based).
///
/// At `ξ = 0` the convention value 0 is returned.
pub fn bilinear_symbol<T: Real>(xi: [T; 3], alpha: T, i: usize, j: usize, k: usize) -> Complex<T> {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if r2 == T::zero() {
        return czero();
    }
    let delta = if i == j { T::one() } else { T::zero() };
    let p = delta - xi[i] * xi[j] / r2;
    Complex::new(T::zero(), -p * xi[k] / r2.sqrt().powf(alpha))
}

/// Spectral transforms of the six products `u_j u_k`, in [`PAIRS`] order.
pub fn tensor_products<T: Real>(u: &RealVectorField<T>) -> [Vec<Complex<T>>; 6] {
    let g = &u.grid;
    let [a, b, c] = &u.components;
    let prod = |x: &[T], y: &[T]| -> Vec<T> { x.iter().zip(y).map(|(&p, &q)| p * q).collect() };
    let (p00, p11) = fft::forward_real_pair(g, &prod(a, a), &prod(b, b));
    let (p22, p01) = fft::forward_real_pair(g, &prod(c, c), &prod(a, b));
    let (p02, p12) = fft::forward_real_pair(g, &prod(a, c), &prod(b, c));
    [p00, p11, p22, p01, p02, p12]
}

/// `ℙ div(u⊗u)` from the transformed products; Nyquist rows and the zero mode vanish.
pub fn advection_from_products<T: Real>(
    grid: &Grid<T>,
    products: &[Vec<Complex<T>>; 6],
    dealias: bool,
) -> SpectralVectorField<T> {
    let g = grid;
    let f = g.axis_frequencies();
    let mut out = SpectralVectorField::zeros(*g);
    for flat in 1..g.len() {
        if g.touches_nyquist(flat) || (dealias && !g.in_dealias_sphere(flat)) {
            continue;
        }
        let (a, b, c) = g.unravel(flat);
        let xi = [f[a], f[b], f[c]];
        let mut w = [czero::<T>(); 3];
        for (j, wj) in w.iter_mut().enumerate() {
            let mut s = czero::<T>();
            for (k, &xk) in xi.iter().enumerate() {
                s += products[pair_index(j, k)][flat] * xk;
            }
            *wj = Complex::new(-s.im, s.re);
        }
        let p = projector(xi);
        for (i, comp) in out.components.iter_mut().enumerate() {
            comp[flat] = w[0] * p[i][0] + w[1] * p[i][1] + w[2] * p[i][2];
        }
    }
    out
}

/// `ℙ div(u⊗u)` for a physical-space velocity.
pub fn advection_term<T: Real>(u: &RealVectorField<T>, dealias: bool) -> SpectralVectorField<T> {
    let products = tensor_products(u);
    advection_from_products(&u.grid, &products, dealias)
}

/// `B(u,u)` from a physical-space velocity already confined to the dealiasing sphere
/// (when dealiasing is on).
pub fn bilinear_from_physical<T: Real>(
    u: &RealVectorField<T>,
    params: &FracParams<T>,
) -> Result<SpectralVectorField<T>> {
    let mut adv = advection_term(u, params.dealias);
    let g = u.grid;
    for flat in 1..g.len() {
        let xi = g.wavevector(flat);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let s = -r.powf(-params.alpha);
        for c in adv.components.iter_mut() {
            c[flat] = c[flat] * s;
        }
    }
    if !adv.is_finite() {
        return Err(Error::NumericalBlowup("bilinear term overflowed".into()));
    }
    Ok(adv)
}

/// `B(u,u) = −(−Δ)^{−α/2} ℙ div(u⊗u)`, output divergence-free with zero mean.
pub fn apply_bilinear<T: Real>(
    u: &SpectralVectorField<T>,
    params: &FracParams<T>,
) -> Result<SpectralVectorField<T>> {
    let phys = if params.dealias {
        dealias(u).to_physical()
    } else {
        u.to_physical()
    };
    if !phys.is_finite() {
        return Err(Error::NumericalBlowup("velocity not finite".into()));
    }
    bilinear_from_physical(&phys, params)
}

/// Applies the 2/3 mask to raw coefficient arrays.
pub fn dealias_products<T: Real>(grid: &Grid<T>, products: &mut [Vec<Complex<T>>; 6]) {
    dealias_in_place(grid, products);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::leray_project;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_solenoidal(n: usize, l: f64, seed: u64, amp: f64) -> SpectralVectorField<f64> {
        let g = Grid::<f64>::new(n, l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = RealVectorField::zeros(g);
        f.components
            .iter_mut()
            .flatten()
            .for_each(|v| *v = amp * rng.gen_range(-1.0..1.0));
        let mut s = leray_project(&dealias(&f.to_spectral()));
        for c in s.components.iter_mut() {
            c[0] = czero();
        }
        s
    }

    #[test]
    fn symbol_hand_values() {
        let s = bilinear_symbol([1.0, 0.0, 0.0], 2.0, 1, 1, 0);
        assert!((s - Complex::new(0.0, -1.0)).norm() < 1e-15);
        for alpha in [1.1, 2.0, 3.7] {
            assert_eq!(bilinear_symbol([1.0, 0.0, 0.0], alpha, 0, 0, 0), czero());
        }
        assert_eq!(bilinear_symbol([0.0, 0.0, 0.0], 2.0, 0, 1, 2), czero());
    }

    #[test]
    fn symbol_is_homogeneous_of_degree_one_minus_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let lambda: f64 = rng.gen_range(0.1..10.0);
            let alpha = rng.gen_range(1.01..3.99);
            let (i, j, k) = (rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3));
            let a = bilinear_symbol(xi.map(|x| lambda * x), alpha, i, j, k);
            let b = bilinear_symbol(xi, alpha, i, j, k) * lambda.powf(1.0 - alpha);
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = Grid::<f64>::new(8, 1.0).unwrap();
        let b = apply_bilinear(&SpectralVectorField::zeros(g), &FracParams::new(1.5, true)).unwrap();
        assert_eq!(b.max_coefficient(), 0.0);
    }

    #[test]
    fn output_is_solenoidal_and_mean_free() {
        let u = random_solenoidal(16, 4.0, 2, 1.0);
        let b = apply_bilinear(&u, &FracParams::new(1.7, true)).unwrap();
        assert!(b.max_divergence() < 1e-12 * b.max_coefficient());
        assert_eq!(b.zero_mode(), [czero(); 3]);
        assert!(b.hermitian_defect() < 1e-15 * b.max_coefficient().max(1e-300) * 1e3);
    }

    /// Factorized evaluation agrees with the entrywise sum `Σ_{jk} m̂_{ijk} (u_ju_k)^`.
    #[test]
    fn factorized_kernel_matches_entrywise_symbol() {
        let u = random_solenoidal(12, 3.0, 4, 1.0);
        let params = FracParams::new(1.8, true);
        let b = apply_bilinear(&u, &params).unwrap();
        let phys = dealias(&u).to_physical();
        let prods = tensor_products(&phys);
        let g = u.grid;
        for flat in (1..g.len()).step_by(7) {
            if g.touches_nyquist(flat) || !g.in_dealias_sphere(flat) {
                continue;
            }
            let xi = g.wavevector(flat);
            for i in 0..3 {
                let mut s = czero::<f64>();
                for j in 0..3 {
                    for k in 0..3 {
                        s += bilinear_symbol(xi, params.alpha, i, j, k) * prods[pair_index(j, k)][flat];
                    }
                }
                assert!((s - b.components[i][flat]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn advection_is_energy_neutral_when_dealiased() {
        let u = random_solenoidal(16, 6.0, 8, 1.0);
        let adv = advection_term(&u.to_physical(), true);
        let e = adv.inner(&u).unwrap();
        let nu = u.l2_norm();
        assert!(e.abs() < 1e-8 * nu * nu * nu, "energy leak {e}");
    }

    #[test]
    fn rescaled_grid_covariance() {
        let u = random_solenoidal(16, 8.0, 5, 1.0);
        let alpha = 1.6;
        let lambda = 2.0f64;
        let params = FracParams::new(alpha, true);
        let b = apply_bilinear(&u, &params).unwrap();
        let small = u.grid.rescaled(lambda).unwrap();
        let ul = u.with_grid(small).unwrap().scaled(lambda.powf(alpha - 1.0));
        let bl = apply_bilinear(&ul, &params).unwrap();
        let expect = b.with_grid(small).unwrap().scaled(lambda.powf(alpha - 1.0));
        let err = bl.sub(&expect).unwrap().max_coefficient();
        assert!(err < 1e-10 * expect.max_coefficient());
    }
}
