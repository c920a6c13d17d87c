use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::error::Result;
use crate::spectral::{fft, projector, validate_kernel_alpha, Grid, PAIRS};

/// A rank-three tensor `m[i][j][k]`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Default resolution of the auxiliary kernel grid.
pub const DEFAULT_KERNEL_GRID: usize = 128;

/// Default number of sphere samples.
pub const DEFAULT_SPHERE_SAMPLES: usize = 600;

const RAY_SAMPLES: usize = 12;
const SMOOTHING: f64 = 1.5;

/// Exponents of the 21 monomials of degree five.
fn quintic_exponents() -> Vec<[i32; 3]> {
    let mut out = Vec::with_capacity(21);
    for a in (0..=5).rev() {
        for b in (0..=5 - a).rev() {
            out.push([a, b, 5 - a - b]);
        }
    }
    out
}

fn monomials(w: [f64; 3], exps: &[[i32; 3]]) -> Vec<f64> {
    exps.iter()
        .map(|e| w[0].powi(e[0]) * w[1].powi(e[1]) * w[2].powi(e[2]))
        .collect()
}

fn unit(x: [f64; 3]) -> [f64; 3] {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    [x[0] / r, x[1] / r, x[2] / r]
}

/// Fibonacci lattice of `n` nearly uniform points on the unit sphere.
pub fn sphere_points(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// `m:M`, i.e. `Σ_{jk} m_{ijk} M_{jk}`.
pub fn contract(m: &Tensor3, moments: &[[f64; 3]; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += m[i][j][k] * moments[j][k];
            }
        }
        s
    })
}

fn frobenius(m: &Tensor3) -> f64 {
    m.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smooth low-pass `e^{−s}(1 + s + s²/2 + s³/6)` in `s = ε²|ξ|²`; it equals `1 − O(s⁴)`,
/// so the smoothed kernel agrees with the exact one to `O((ε/r)⁸)`.
pub(crate) fn low_pass(s: f64) -> f64 {
    (-s).exp() * (1.0 + s + s * s / 2.0 + s * s * s / 6.0)
}

/// Real-space kernel `m_α` of `B(u,u) = m_α ∗ (u⊗u)`, homogeneous of degree `α − 4`.
#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousKernel {
    pub alpha: f64,
    pub degree: f64,
    /// Resolution of the auxiliary grid the samples were read from.
    pub grid_n: usize,
    pub sphere_points: Vec<[f64; 3]>,
    /// `m(ω)` at every sphere point.
    pub sphere_samples: Vec<Tensor3>,
    /// Largest Frobenius norm over the samples and over the evaluated representation.
    pub bound: f64,
    #[serde(skip)]
    coefficients: Vec<Vec<f64>>,
    #[serde(skip)]
    exponents: Vec<[i32; 3]>,
}

impl HomogeneousKernel {
    /// `m(ω)` for a unit vector.
    pub fn eval_unit(&self, w: [f64; 3]) -> Tensor3 {
        let mono = monomials(w, &self.exponents);
        let mut m = [[[0.0; 3]; 3]; 3];
        for (c, coef) in self.coefficients.iter().enumerate() {
            let (i, j) = PAIRS[c / 3];
            let k = c % 3;
            let v: f64 = coef.iter().zip(&mono).map(|(a, b)| a * b).sum();
            m[i][j][k] = v;
            m[j][i][k] = v;
        }
        m
    }

    /// `m(x) = |x|^{α−4} m(x/|x|)`; zero at the origin.
    pub fn eval(&self, x: [f64; 3]) -> Tensor3 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return [[[0.0; 3]; 3]; 3];
        }
        let s = r.powf(self.degree);
        let mut m = self.eval_unit([x[0] / r, x[1] / r, x[2] / r]);
        m.iter_mut().flatten().flatten().for_each(|v| *v *= s);
        m
    }

    /// `|m(ω)|` in the Frobenius norm.
    pub fn magnitude_unit(&self, w: [f64; 3]) -> f64 {
        frobenius(&self.eval_unit(w))
    }

    /// Coefficients of `ω ↦ (m(ω):M)_i` in the quintic monomial basis.
    pub(crate) fn contracted_coefficients(&self, moments: &[[f64; 3]; 3]) -> [Vec<f64>; 3] {
        let nb = self.exponents.len();
        let mut out = [vec![0.0; nb], vec![0.0; nb], vec![0.0; nb]];
        for (c, coef) in self.coefficients.iter().enumerate() {
            let (i, j) = PAIRS[c / 3];
            let k = c % 3;
            for (o, a) in out[i].iter_mut().zip(coef) {
                *o += a * moments[j][k];
            }
            if i != j {
                for (o, a) in out[j].iter_mut().zip(coef) {
                    *o += a * moments[i][k];
                }
            }
        }
        out
    }

    pub(crate) fn exponents(&self) -> &[[i32; 3]] {
        &self.exponents
    }
}

/// Six-point Lagrange interpolation of a periodic sample array with unit spacing.
fn interpolate(values: &[f64], n: usize, p: [f64; 3]) -> f64 {
    let mut base = [0i64; 3];
    let mut w = [[0.0; 6]; 3];
    for d in 0..3 {
        let b = p[d].floor() as i64 - 2;
        base[d] = b;
        let t = p[d] - b as f64;
        for m in 0..6 {
            let mut acc = 1.0;
            for l in 0..6 {
                if l != m {
                    acc *= (t - l as f64) / (m as f64 - l as f64);
                }
            }
            w[d][m] = acc;
        }
    }
    let wrap = |i: i64| i.rem_euclid(n as i64) as usize;
    let mut s = 0.0;
    for a in 0..6 {
        let ia = wrap(base[0] + a as i64);
        for b in 0..6 {
            let ib = wrap(base[1] + b as i64);
            let wab = w[0][a] * w[1][b];
            let row = (ia * n + ib) * n;
            for c in 0..6 {
                s += wab * w[2][c] * values[row + wrap(base[2] + c as i64)];
            }
        }
    }
    s
}

fn pseudo_inverse(rows: usize, cols: usize, entries: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(rows, cols, entries);
    a.svd(true, true)
        .pseudo_inverse(1e-13)
        .expect("SVD with both factors requested")
}

/// Builds the kernel from the symbol `−ℙ_{ij}(ξ) iξ_k |ξ|^{−α}` on an auxiliary grid of
/// `grid_n³` unit cells.
///
/// Along each sphere ray the smoothed periodic kernel is fitted by
/// `A r^{α−4} + B r + C r³`, separating the homogeneous part from the smooth
/// contribution of the periodic images; the coefficients `A` are the sphere samples,
/// which are then represented by odd polynomials of degree five.
pub fn build_kernel(alpha: f64, grid_n: usize) -> Result<HomogeneousKernel> {
    build_kernel_with(alpha, grid_n, DEFAULT_SPHERE_SAMPLES)
}

/// [`build_kernel`] with an explicit number of sphere samples.
pub fn build_kernel_with(alpha: f64, grid_n: usize, samples: usize) -> Result<HomogeneousKernel> {
    validate_kernel_alpha(alpha)?;
    let g = Grid::<f64>::new(grid_n, grid_n as f64)?;
    let n = grid_n;
    let points = sphere_points(samples.max(500));
    let degree = alpha - 4.0;

    let r_hi = n as f64 / 4.0;
    let r_lo = (n as f64 / 8.0).max(8.0);
    let radii: Vec<f64> = (0..RAY_SAMPLES)
        .map(|l| r_lo + (r_hi - r_lo) * l as f64 / (RAY_SAMPLES - 1) as f64)
        .collect();
    let fit = pseudo_inverse(RAY_SAMPLES, 3, |l, c| {
        let x = radii[l] / r_hi;
        match c {
            0 => x.powf(degree),
            1 => x,
            _ => x.powi(3),
        }
    });
    // homogeneous amplitude from the samples of one ray
    let amp_weights: Vec<f64> = (0..RAY_SAMPLES).map(|l| fit[(0, l)] / r_hi.powf(degree)).collect();

    let volume = g.volume();
    let symbol = |flat: usize, pair: usize, k: usize| -> Complex<f64> {
        if flat == 0 || g.touches_nyquist(flat) {
            return Complex::new(0.0, 0.0);
        }
        let xi = g.wavevector(flat);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let (i, j) = PAIRS[pair];
        let p = projector(xi)[i][j];
        let v = -p * xi[k] * r2.powf(-alpha / 2.0) * low_pass(SMOOTHING * SMOOTHING * r2) / volume;
        Complex::new(0.0, v)
    };

    let mut samples_by_comp = vec![vec![0.0; points.len()]; 18];
    for pass in 0..9 {
        let (c0, c1) = (2 * pass, 2 * pass + 1);
        let a: Vec<Complex<f64>> = (0..g.len()).map(|f| symbol(f, c0 / 3, c0 % 3)).collect();
        let b: Vec<Complex<f64>> = (0..g.len()).map(|f| symbol(f, c1 / 3, c1 % 3)).collect();
        let (ra, rb) = fft::inverse_real_pair(&g, &a, &b);
        drop((a, b));
        for (p, w) in points.iter().enumerate() {
            let mut sa = 0.0;
            let mut sb = 0.0;
            for (l, &r) in radii.iter().enumerate() {
                let x = [w[0] * r, w[1] * r, w[2] * r];
                sa += amp_weights[l] * interpolate(&ra, n, x);
                sb += amp_weights[l] * interpolate(&rb, n, x);
            }
            samples_by_comp[c0][p] = sa;
            samples_by_comp[c1][p] = sb;
        }
    }

    let exponents = quintic_exponents();
    let design: Vec<Vec<f64>> = points.iter().map(|&w| monomials(w, &exponents)).collect();
    let proj = pseudo_inverse(points.len(), exponents.len(), |r, c| design[r][c]);
    let coefficients: Vec<Vec<f64>> = samples_by_comp
        .iter()
        .map(|vals| {
            (0..exponents.len())
                .map(|c| (0..points.len()).map(|r| proj[(c, r)] * vals[r]).sum())
                .collect()
        })
        .collect();

    let sphere_samples: Vec<Tensor3> = (0..points.len())
        .map(|p| {
            let mut m = [[[0.0; 3]; 3]; 3];
            for (c, vals) in samples_by_comp.iter().enumerate() {
                let (i, j) = PAIRS[c / 3];
                m[i][j][c % 3] = vals[p];
                m[j][i][c % 3] = vals[p];
            }
            m
        })
        .collect();

    let mut kernel = HomogeneousKernel {
        alpha,
        degree,
        grid_n,
        sphere_points: points,
        sphere_samples,
        bound: 0.0,
        coefficients,
        exponents,
    };
    let sample_max = kernel.sphere_samples.iter().map(frobenius).fold(0.0, f64::max);
    kernel.bound = sphere_maximum(|w| kernel.magnitude_unit(w)).max(sample_max);
    Ok(kernel)
}

/// Maximum of a smooth function on the sphere: dense sweep, then local ascent from the best starts.
fn sphere_maximum(f: impl Fn([f64; 3]) -> f64) -> f64 {
    let sweep = sphere_points(20_000);
    let mut scored: Vec<(f64, [f64; 3])> = sweep.iter().map(|&w| (f(w), w)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = scored[0].0;
    for &(v0, w0) in scored.iter().take(24) {
        let (mut v, mut w) = (v0, w0);
        let mut step = 0.02;
        while step > 1e-10 {
            let (t1, t2) = tangent_basis(w);
            let mut improved = false;
            for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                let cand = unit([0, 1, 2].map(|d| w[d] + step * (a * t1[d] + b * t2[d])));
                let fv = f(cand);
                if fv > v {
                    v = fv;
                    w = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

fn tangent_basis(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let e = if w[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t1 = unit([
        e[1] * w[2] - e[2] * w[1],
        e[2] * w[0] - e[0] * w[2],
        e[0] * w[1] - e[1] * w[0],
    ]);
    let t2 = [
        w[1] * t1[2] - w[2] * t1[1],
        w[2] * t1[0] - w[0] * t1[2],
        w[0] * t1[1] - w[1] * t1[0],
    ];
    (t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `−δ_{ij}∂_kG − ∂_i∂_j∂_k𝒩` with `G = 1/(4π|x|)`, `𝒩 = −|x|/(8π)`.
    fn classical(x: [f64; 3]) -> Tensor3 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let pi = std::f64::consts::PI;
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut m = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let dk_g = -x[k] / (4.0 * pi * r.powi(3));
                    let d3r = 3.0 * x[i] * x[j] * x[k] / r.powi(5)
                        - (d(i, j) * x[k] + d(i, k) * x[j] + d(j, k) * x[i]) / r.powi(3);
                    m[i][j][k] = -d(i, j) * dk_g + d3r / (8.0 * pi);
                }
            }
        }
        m
    }

    fn gamma(x: f64) -> f64 {
        const C: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let pi = std::f64::consts::PI;
        if x < 0.5 {
            return pi / ((pi * x).sin() * gamma(1.0 - x));
        }
        let x = x - 1.0;
        let t = x + 7.5;
        let a = C[0] + (1..9).map(|i| C[i] / (x + i as f64)).sum::<f64>();
        (2.0 * pi).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }

    /// Isotropic form `a δ_{ij}ω_k + b(δ_{ij}ω_k + δ_{ik}ω_j + δ_{jk}ω_i) + c ω_iω_jω_k`
    /// obtained from the Riesz potential `|ξ|^{−α} ↔ c_α |x|^{α−3}`.
    fn isotropic(alpha: f64, w: [f64; 3]) -> Tensor3 {
        let ca = gamma((3.0 - alpha) / 2.0)
            / (2f64.powf(alpha) * std::f64::consts::PI.powf(1.5) * gamma(alpha / 2.0));
        let a = -ca * (alpha - 3.0);
        let b = ca * (alpha - 3.0) / alpha;
        let c = ca * (alpha - 3.0) * (alpha - 5.0) / alpha;
        let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        let mut m = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j][k] = a * d(i, j) * w[k]
                        + b * (d(i, j) * w[k] + d(i, k) * w[j] + d(j, k) * w[i])
                        + c * w[i] * w[j] * w[k];
                }
            }
        }
        m
    }

    fn worst_relative(k: &HomogeneousKernel, exact: impl Fn([f64; 3]) -> Tensor3) -> f64 {
        let mut worst: f64 = 0.0;
        for (w, m) in k.sphere_points.iter().zip(&k.sphere_samples) {
            let e = exact(*w);
            let mut d = *m;
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        d[i][j][l] -= e[i][j][l];
                    }
                }
            }
            worst = worst.max(frobenius(&d) / frobenius(&e));
        }
        worst
    }

    #[test]
    fn isotropic_oracle_and_refinement() {
        for alpha in [1.2, 3.5] {
            let coarse = build_kernel(alpha, 64).unwrap();
            let fine = build_kernel(alpha, 128).unwrap();
            let err = worst_relative(&fine, |w| isotropic(alpha, w));
            assert!(err < 2e-3, "alpha {alpha}: {err}");
            assert!((coarse.bound - fine.bound).abs() < 0.1 * fine.bound);
            let sample_max = fine.sphere_samples.iter().map(frobenius).fold(0.0, f64::max);
            assert!(sample_max <= fine.bound);
        }
    }

    #[test]
    fn sphere_points_are_unit_and_balanced() {
        let p = sphere_points(600);
        assert_eq!(p.len(), 600);
        let mut c = [0.0; 3];
        for w in &p {
            assert!(((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) - 1.0).abs() < 1e-14);
            for d in 0..3 {
                c[d] += w[d] / 600.0;
            }
        }
        assert!(c.iter().all(|v| v.abs() < 1e-2));
    }

    #[test]
    fn rejects_alpha_outside_range() {
        assert!(build_kernel(1.0, 32).is_err());
        assert!(build_kernel(4.0, 32).is_err());
    }

    #[test]
    fn newtonian_oracle_and_homogeneity() {
        let k = build_kernel(2.0, 64).unwrap();
        let worst = worst_relative(&k, classical);
        assert!(worst < 0.02, "relative error {worst}");

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = [0, 1, 2].map(|_| rng.gen_range(-3.0..3.0));
            let lam: f64 = rng.gen_range(0.2..5.0);
            let a = k.eval(x.map(|v| lam * v));
            let b = k.eval(x);
            let s = lam.powf(k.degree);
            let mut err: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        err = err.max((a[i][j][l] - s * b[i][j][l]).abs());
                    }
                }
            }
            assert!(err <= 1e-14 * frobenius(&a));
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            assert!(frobenius(&b) <= k.bound * r.powf(k.degree) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn scalar_moments_annihilate_the_kernel() {
        let k = build_kernel(1.5, 48).unwrap();
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for m in &k.sphere_samples {
            let v = contract(m, &eye);
            assert!(v.iter().all(|c| c.abs() < 1e-12 * k.bound));
        }
        let coef = k.contracted_coefficients(&eye);
        assert!(coef.iter().flatten().all(|c| c.abs() < 1e-10 * k.bound));
    }
}
