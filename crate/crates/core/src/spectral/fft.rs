//! Three-dimensional transforms built from `rustfft` line transforms.
//!
//! Spectral coefficients are normalized Fourier-series amplitudes: the
//! physical field is `u(x) = Σ_ξ û(ξ) e^{iξ·x}`, so a forward transform
//! carries the `1/n³` factor and the inverse carries none.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;
use crate::scalar::Real;

struct Plans<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

type PlanCache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn plans<T: Real>(n: usize) -> Arc<Plans<T>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("plan cache poisoned");
    let entry = guard
        .entry((TypeId::of::<T>(), n))
        .or_insert_with(|| {
            let mut planner = FftPlanner::<T>::new();
            let p: Arc<Plans<T>> = Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            });
            p as Arc<dyn Any + Send + Sync>
        })
        .clone();
    drop(guard);
    entry
        .downcast::<Plans<T>>()
        .unwrap_or_else(|_| unreachable!("plan cache keyed by type id"))
}

/// Out-of-place blocked transpose of a `rows × cols` row-major matrix.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn transform<T: Real>(n: usize, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
    assert_eq!(data.len(), n * n * n, "buffer does not match grid");
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    // last axis: contiguous rows
    fft.process_with_scratch(data, &mut scratch);
    // middle axis: transpose each plane
    let mut plane = vec![Complex::new(T::zero(), T::zero()); n * n];
    for chunk in data.chunks_exact_mut(n * n) {
        transpose(chunk, &mut plane, n, n);
        fft.process_with_scratch(&mut plane, &mut scratch);
        transpose(&plane, chunk, n, n);
    }
    // first axis: view as n × n² and transpose
    let mut big = vec![Complex::new(T::zero(), T::zero()); n * n * n];
    transpose(data, &mut big, n, n * n);
    fft.process_with_scratch(&mut big, &mut scratch);
    transpose(&big, data, n * n, n);
}

/// Forward transform in place, including the `1/n³` normalization.
pub fn forward_in_place<T: Real>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    let p = plans::<T>(grid.n());
    transform(grid.n(), data, &p.forward);
    let scale = T::one() / T::from_count(grid.len());
    for c in data.iter_mut() {
        *c = *c * scale;
    }
}

/// Inverse transform in place (no normalization).
pub fn inverse_in_place<T: Real>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    let p = plans::<T>(grid.n());
    transform(grid.n(), data, &p.inverse);
}

/// Forward transform of a real array.
pub fn forward_real<T: Real>(grid: &Grid<T>, values: &[T]) -> Vec<Complex<T>> {
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    forward_in_place(grid, &mut buf);
    buf
}

/// Inverse transform keeping the real part.
pub fn inverse_real<T: Real>(grid: &Grid<T>, coeffs: &[Complex<T>]) -> Vec<T> {
    let mut buf = coeffs.to_vec();
    inverse_in_place(grid, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Forward transforms of two real arrays with a single complex transform.
pub fn forward_real_pair<T: Real>(
    grid: &Grid<T>,
    a: &[T],
    b: &[T],
) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let mut z: Vec<Complex<T>> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
    forward_in_place(grid, &mut z);
    let half = T::lit(0.5);
    let mut fa = Vec::with_capacity(z.len());
    let mut fb = Vec::with_capacity(z.len());
    for flat in 0..z.len() {
        let zp = z[flat];
        let zm = z[grid.negated(flat)].conj();
        fa.push((zp + zm) * half);
        // (zp - zm) / (2i)
        let d = (zp - zm) * half;
        fb.push(Complex::new(d.im, -d.re));
    }
    (fa, fb)
}

/// Inverse transforms of two Hermitian coefficient arrays with a single complex transform.
pub fn inverse_real_pair<T: Real>(
    grid: &Grid<T>,
    a: &[Complex<T>],
    b: &[Complex<T>],
) -> (Vec<T>, Vec<T>) {
    let mut z: Vec<Complex<T>> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x + Complex::new(-y.im, y.re))
        .collect();
    inverse_in_place(grid, &mut z);
    let re = z.iter().map(|c| c.re).collect();
    let im = z.iter().map(|c| c.im).collect();
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(grid: &Grid<f64>, values: &[f64]) -> Vec<Complex<f64>> {
        let n = grid.n();
        let mut out = vec![Complex::new(0.0, 0.0); grid.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let (a, b, c) = grid.unravel(flat);
            for (src, &v) in values.iter().enumerate() {
                let (i, j, k) = grid.unravel(src);
                let phase = -2.0 * std::f64::consts::PI * ((a * i + b * j + c * k) as f64) / n as f64;
                *o += Complex::from_polar(v, phase);
            }
            *o /= grid.len() as f64;
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let g = Grid::new(8, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = forward_real(&g, &v);
        let slow = naive_dft(&g, &v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn paired_transforms_match_single_ones() {
        let g = Grid::new(16, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (fa, fb) = forward_real_pair(&g, &a, &b);
        let sa = forward_real(&g, &a);
        let sb = forward_real(&g, &b);
        for i in 0..g.len() {
            assert!((fa[i] - sa[i]).norm() < 1e-14);
            assert!((fb[i] - sb[i]).norm() < 1e-14);
        }
        let (ra, rb) = inverse_real_pair(&g, &fa, &fb);
        for i in 0..g.len() {
            assert!((ra[i] - a[i]).abs() < 1e-12);
            assert!((rb[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_on_its_mode() {
        let g = Grid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let vals: Vec<f64> = (0..g.len())
            .map(|flat| {
                let (i, j, k) = g.unravel(flat);
                let x = [i, j, k].map(|a| a as f64 * g.spacing());
                (x[0] + 2.0 * x[1] - x[2]).cos()
            })
            .collect();
        let c = forward_real(&g, &vals);
        let plus = g.index(1, 2, 7);
        let minus = g.negated(plus);
        assert!((c[plus].re - 0.5).abs() < 1e-14);
        assert!((c[minus].re - 0.5).abs() < 1e-14);
        let rest: f64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != plus && *i != minus)
            .map(|(_, z)| z.norm())
            .sum();
        assert!(rest < 1e-12);
    }
}
