use num_complex::Complex;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real scalar samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
}

/// Spectral coefficients of a real scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalarField<T> {
    pub grid: Grid<T>,
    pub coeffs: Vec<Complex<T>>,
}

/// Three-component real field in physical space.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVectorField<T> {
    pub grid: Grid<T>,
    pub components: [Vec<T>; 3],
}

/// Three-component field in the frequency representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField<T> {
    pub grid: Grid<T>,
    pub components: [Vec<Complex<T>>; 3],
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn check_same_grid<T: Real>(a: &Grid<T>, b: &Grid<T>) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            values: vec![T::zero(); grid.len()],
            grid,
        }
    }

    /// Samples `f` at the minimum-image position of every grid point.
    pub fn from_fn(grid: Grid<T>, f: impl Fn([T; 3]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values }
    }

    pub fn to_spectral(&self) -> SpectralScalarField<T> {
        SpectralScalarField {
            grid: self.grid,
            coeffs: fft::forward_real(&self.grid, &self.values),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| v * a).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl<T: Real> SpectralScalarField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            coeffs: vec![czero(); grid.len()],
            grid,
        }
    }

    pub fn to_physical(&self) -> ScalarField<T> {
        ScalarField {
            grid: self.grid,
            values: fft::inverse_real(&self.grid, &self.coeffs),
        }
    }

    /// Discrete `L²` norm through Parseval, `(L³ Σ|ĉ|²)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        (self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<T>()).sqrt()
    }

    pub fn max_coefficient(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Largest violation of `ĉ(−ξ) = conj ĉ(ξ)`.
    pub fn hermitian_defect(&self) -> T {
        hermitian_defect(&self.grid, &self.coeffs)
    }
}

impl<T: Real> RealVectorField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            components: [
                vec![T::zero(); grid.len()],
                vec![T::zero(); grid.len()],
                vec![T::zero(); grid.len()],
            ],
            grid,
        }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn([T; 3]) -> [T; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for i in 0..grid.len() {
            let v = f(grid.position(i));
            for (c, vc) in out.components.iter_mut().zip(v) {
                c[i] = vc;
            }
        }
        out
    }

    pub fn to_spectral(&self) -> SpectralVectorField<T> {
        let g = &self.grid;
        let [a, b, c] = &self.components;
        let (fa, fb) = fft::forward_real_pair(g, a, b);
        let fc = fft::forward_real(g, c);
        SpectralVectorField {
            grid: self.grid,
            components: [fa, fb, fc],
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField<T> {
        let [a, b, c] = &self.components;
        let values = (0..self.grid.len())
            .map(|i| (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt())
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs(&self) -> T {
        self.magnitude().max_abs()
    }

    /// Riemann-sum `L²` norm.
    pub fn l2_norm(&self) -> T {
        let s: T = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|&v| v * v)
            .sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.is_finite())
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.components
            .iter_mut()
            .flatten()
            .for_each(|v| *v = *v * a);
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let mut out = self.clone();
        for (c, o) in out.components.iter_mut().zip(&other.components) {
            for (v, w) in c.iter_mut().zip(o) {
                *v -= *w;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let mut out = self.clone();
        for (c, o) in out.components.iter_mut().zip(&other.components) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += *w;
            }
        }
        Ok(out)
    }
}

impl<T: Real> SpectralVectorField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            components: [
                vec![czero(); grid.len()],
                vec![czero(); grid.len()],
                vec![czero(); grid.len()],
            ],
            grid,
        }
    }

    pub fn to_physical(&self) -> RealVectorField<T> {
        let g = &self.grid;
        let [a, b, c] = &self.components;
        let (ra, rb) = fft::inverse_real_pair(g, a, b);
        let rc = fft::inverse_real(g, c);
        RealVectorField {
            grid: self.grid,
            components: [ra, rb, rc],
        }
    }

    /// Discrete `L²` norm through Parseval.
    pub fn l2_norm(&self) -> T {
        let s: T = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|c| c.norm_sqr())
            .sum();
        (self.grid.volume() * s).sqrt()
    }

    /// Discrete `L²` inner product `∫ u·v` (real part).
    pub fn inner(&self, other: &Self) -> Result<T> {
        check_same_grid(&self.grid, &other.grid)?;
        let mut s = T::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            for (x, y) in a.iter().zip(b) {
                s += (x * y.conj()).re;
            }
        }
        Ok(s * self.grid.volume())
    }

    pub fn max_coefficient(&self) -> T {
        self.components
            .iter()
            .flatten()
            .fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn zero_mode(&self) -> [Complex<T>; 3] {
        [
            self.components[0][0],
            self.components[1][0],
            self.components[2][0],
        ]
    }

    pub fn hermitian_defect(&self) -> T {
        self.components
            .iter()
            .map(|c| hermitian_defect(&self.grid, c))
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.components
            .iter_mut()
            .flatten()
            .for_each(|c| *c = *c * a);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -T::one())
    }

    /// `self + a·other`.
    pub fn combine(&self, other: &Self, a: T) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let mut out = self.clone();
        for (c, o) in out.components.iter_mut().zip(&other.components) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += *w * a;
            }
        }
        Ok(out)
    }

    /// Relabels the same coefficients onto a grid of equal resolution.
    pub fn with_grid(&self, grid: Grid<T>) -> Result<Self> {
        if grid.n() != self.grid.n() {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        out.grid = grid;
        Ok(out)
    }

    /// Largest `|ξ·û(ξ)|` over the lattice.
    pub fn max_divergence(&self) -> T {
        let g = &self.grid;
        let f = g.axis_frequencies();
        let mut worst = T::zero();
        for flat in 0..g.len() {
            let (i, j, k) = g.unravel(flat);
            let d = self.components[0][flat] * f[i]
                + self.components[1][flat] * f[j]
                + self.components[2][flat] * f[k];
            worst = worst.max(d.norm());
        }
        worst
    }
}

pub(crate) fn hermitian_defect<T: Real>(grid: &Grid<T>, c: &[Complex<T>]) -> T {
    (0..grid.len())
        .map(|flat| (c[flat] - c[grid.negated(flat)].conj()).norm())
        .fold(T::zero(), T::max)
}
