use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic box `[0, L)^3` sampled with `n` points per axis.
///
/// The frequency lattice is `{2πk/L : k ∈ [−n/2, n/2)}` on every axis, in
/// standard DFT ordering (index `i < n/2` maps to `k = i`, otherwise `k = i − n`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    n: usize,
    box_length: T,
    spacing: T,
}

impl<T: Real> Grid<T> {
    pub fn new(n: usize, box_length: T) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        let spacing = box_length / T::from_count(n);
        Ok(Self {
            n,
            box_length: spacing * T::from_count(n),
            spacing,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> T {
        self.box_length
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Number of samples, `n³`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn cell_volume(&self) -> T {
        self.spacing * self.spacing * self.spacing
    }

    #[inline]
    pub fn volume(&self) -> T {
        self.box_length * self.box_length * self.box_length
    }

    /// Signed integer wavenumber of an axis index.
    #[inline]
    pub fn wavenumber(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Angular frequency `2πk/L` of an axis index.
    #[inline]
    pub fn frequency(&self, idx: usize) -> T {
        T::lit(self.wavenumber(idx) as f64) * T::TAU() / self.box_length
    }

    /// All axis frequencies in DFT order.
    pub fn axis_frequencies(&self) -> Vec<T> {
        (0..self.n).map(|i| self.frequency(i)).collect()
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        idx == self.n / 2
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unravel(&self, flat: usize) -> (usize, usize, usize) {
        let k = flat % self.n;
        let j = (flat / self.n) % self.n;
        let i = flat / (self.n * self.n);
        (i, j, k)
    }

    /// Wavevector `ξ` of a flat spectral index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [T; 3] {
        let (i, j, k) = self.unravel(flat);
        [self.frequency(i), self.frequency(j), self.frequency(k)]
    }

    /// Integer wavevector of a flat spectral index.
    #[inline]
    pub fn integer_wavevector(&self, flat: usize) -> [i64; 3] {
        let (i, j, k) = self.unravel(flat);
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(k)]
    }

    /// True when any axis index of `flat` is the Nyquist index.
    #[inline]
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let (i, j, k) = self.unravel(flat);
        self.is_nyquist(i) || self.is_nyquist(j) || self.is_nyquist(k)
    }

    /// Flat index of the conjugate partner `−ξ` (Nyquist rows map to themselves).
    #[inline]
    pub fn negated(&self, flat: usize) -> usize {
        let (i, j, k) = self.unravel(flat);
        let neg = |a: usize| (self.n - a) % self.n;
        self.index(neg(i), neg(j), neg(k))
    }

    /// Minimum-image signed offset of an axis index from the origin.
    #[inline]
    pub fn offset(&self, idx: usize) -> T {
        T::lit(self.wavenumber(idx) as f64) * self.spacing
    }

    /// Minimum-image position of a flat physical index relative to the origin sample.
    #[inline]
    pub fn position(&self, flat: usize) -> [T; 3] {
        let (i, j, k) = self.unravel(flat);
        [self.offset(i), self.offset(j), self.offset(k)]
    }

    /// Periodic (minimum-image) distance between two points.
    pub fn periodic_distance(&self, a: [T; 3], b: [T; 3]) -> T {
        let half = self.box_length / T::lit(2.0);
        let mut acc = T::zero();
        for d in 0..3 {
            let mut delta = (a[d] - b[d]) % self.box_length;
            if delta > half {
                delta -= self.box_length;
            } else if delta < -half {
                delta += self.box_length;
            }
            acc += delta * delta;
        }
        acc.sqrt()
    }

    /// Radius of the 2/3-rule dealiasing sphere, `(2/3)·πn/L`.
    #[inline]
    pub fn dealias_radius(&self) -> T {
        T::lit(2.0 / 3.0) * T::PI() * T::from_count(self.n) / self.box_length
    }

    /// Spherical 2/3 rule: keep integer wavevectors with `|κ| < n/3`.
    #[inline]
    pub fn in_dealias_sphere(&self, flat: usize) -> bool {
        let [a, b, c] = self.integer_wavevector(flat);
        let r2 = 9 * (a * a + b * b + c * c);
        r2 < (self.n * self.n) as i64
    }

    /// Same sampling on a box shrunk by `lambda` (used by scaling checks).
    pub fn rescaled(&self, lambda: T) -> Result<Self> {
        Self::new(self.n, self.box_length / lambda)
    }

    /// Largest frequency magnitude on an axis, `πn/L`.
    #[inline]
    pub fn max_frequency(&self) -> T {
        T::PI() * T::from_count(self.n) / self.box_length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spacing_and_frequencies() {
        let g = Grid::<f64>::new(8, 2.0 * PI).unwrap();
        assert_eq!(g.spacing(), PI / 4.0);
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let mut sorted = g.axis_frequencies();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect: Vec<f64> = (-4..4).map(|k| k as f64).collect();
        for (a, b) in sorted.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(Grid::<f64>::new(7, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::<f64>::new(6, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::<f64>::new(8, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::<f64>::new(8, f64::NAN), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn spacing_times_n_is_box_length() {
        for &(n, l) in &[(8usize, 1.0f64), (12, 0.7), (30, 3.3), (64, 16.0)] {
            let g = Grid::<f64>::new(n, l).unwrap();
            assert_eq!(g.spacing() * n as f64, g.box_length());
        }
    }

    #[test]
    fn negation_is_an_involution_and_fixes_nyquist() {
        let g = Grid::<f64>::new(8, 1.0).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.negated(g.negated(flat)), flat);
            let [a, b, c] = g.integer_wavevector(flat);
            let [x, y, z] = g.integer_wavevector(g.negated(flat));
            for (p, q) in [(a, x), (b, y), (c, z)] {
                if p == -4 {
                    assert_eq!(q, -4);
                } else {
                    assert_eq!(p, -q);
                }
            }
        }
    }

    #[test]
    fn periodic_distance_uses_minimum_image() {
        let g = Grid::<f64>::new(8, 10.0).unwrap();
        let d = g.periodic_distance([9.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        assert!((d - 2.0).abs() < 1e-12);
    }
}
