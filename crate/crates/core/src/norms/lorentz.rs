use serde::{Deserialize, Serialize};

use super::Sampled;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponents of a Lorentz space `L^{p,q}`; `q = +∞` selects weak-`L^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams<T = f64> {
    pub p: T,
    pub q: T,
}

impl<T: Real> LorentzParams<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        if !(p >= T::one() && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("Lorentz p must be in [1, ∞), got {p}")));
        }
        if !(q >= T::one()) {
            return Err(Error::InvalidParameter(format!("Lorentz q must be >= 1, got {q}")));
        }
        Ok(Self { p, q })
    }

    /// `L^{p,∞}`.
    pub fn weak(p: T) -> Result<Self> {
        Self::new(p, T::infinity())
    }
}

/// Decreasing rearrangement of a sampled field, as a step function with steps
/// of width `cell_volume`.
#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementTable<T> {
    pub values: Vec<T>,
    pub cell_volume: T,
}

impl<T: Real> RearrangementTable<T> {
    /// `f*(t)`.
    pub fn eval(&self, t: T) -> T {
        if t < T::zero() {
            return self.values.first().copied().unwrap_or(T::zero());
        }
        let idx = (t / self.cell_volume).floor();
        match idx.to_usize() {
            Some(i) if i < self.values.len() => self.values[i],
            _ => T::zero(),
        }
    }

    /// Total measure of the table, `len · cell_volume`.
    pub fn measure(&self) -> T {
        T::from_count(self.values.len()) * self.cell_volume
    }

    /// Lorentz quasinorm evaluated exactly on the step function.
    ///
    /// For `q < ∞` this is `((q/p)∫(t^{1/p}f*(t))^q dt/t)^{1/q}`; for `q = ∞` it is the
    /// supremum of `t^{1/p}f*(t)`, attained at the right end of a step.
    pub fn lorentz(&self, params: &LorentzParams<T>) -> T {
        let vmax = match self.values.first() {
            Some(&v) if v > T::zero() => v,
            _ => return T::zero(),
        };
        let v = self.cell_volume;
        let inv_p = T::one() / params.p;
        if params.q.is_infinite() {
            return self
                .values
                .iter()
                .enumerate()
                .map(|(k, &val)| (T::from_count(k + 1) * v).powf(inv_p) * val)
                .fold(T::zero(), T::max);
        }
        let q = params.q;
        let s = q / params.p;
        let mut acc = T::zero();
        for (k, &val) in self.values.iter().enumerate() {
            if val == T::zero() {
                break;
            }
            // ((k+1)V)^s − (kV)^s without cancellation
            let width = if k == 0 {
                v.powf(s)
            } else {
                let kv = T::from_count(k) * v;
                kv.powf(s) * (s * (T::one() / T::from_count(k)).ln_1p()).exp_m1()
            };
            acc += (val / vmax).powf(q) * width;
        }
        vmax * acc.powf(T::one() / q)
    }
}

/// `d_f(λ) = |{x : |f(x)| > λ}|`, counted on cells.
pub fn distribution_function<T: Real, F: Sampled<T> + ?Sized>(field: &F, lambda: T) -> T {
    let count = field.magnitudes().iter().filter(|&&v| v > lambda).count();
    T::from_count(count) * field.grid().cell_volume()
}

/// Sorted magnitudes in nonincreasing order.
pub fn rearrangement<T: Real, F: Sampled<T> + ?Sized>(field: &F) -> RearrangementTable<T> {
    let mut values = field.magnitudes();
    values.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    RearrangementTable {
        values,
        cell_volume: field.grid().cell_volume(),
    }
}

/// Discrete Lorentz quasinorm `‖f‖_{L^{p,q}}`.
pub fn lorentz_quasinorm<T: Real, F: Sampled<T> + ?Sized>(field: &F, params: &LorentzParams<T>) -> T {
    rearrangement(field).lorentz(params)
}

/// Riemann-sum `L^p` norm; `p = ∞` gives the sup norm.
pub fn lebesgue_norm<T: Real, F: Sampled<T> + ?Sized>(field: &F, p: T) -> T {
    let mags = field.magnitudes();
    let vmax = mags.iter().fold(T::zero(), |m, &v| m.max(v));
    if p.is_infinite() || vmax == T::zero() {
        return vmax;
    }
    let s: T = mags.iter().map(|&v| (v / vmax).powf(p)).sum();
    vmax * (s * field.grid().cell_volume()).powf(T::one() / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealVectorField, ScalarField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 3·(indicator of a set of volume 2) on a grid with unit-volume cells... scaled.
    fn indicator_field() -> ScalarField<f64> {
        // cell volume 1/4, eight cells → volume 2
        let h = 0.25f64.cbrt();
        let g = Grid::<f64>::new(8, 8.0 * h).unwrap();
        let mut f = ScalarField::zeros(g);
        for v in f.values.iter_mut().take(8) {
            *v = 3.0;
        }
        f
    }

    fn random_field(seed: u64) -> ScalarField<f64> {
        let g = Grid::<f64>::new(8, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = ScalarField::zeros(g);
        let scale = rng.gen_range(0.1..10.0);
        f.values
            .iter_mut()
            .for_each(|v| *v = scale * rng.gen_range(-1.0f64..1.0).powi(3));
        f
    }

    #[test]
    fn indicator_distribution_and_rearrangement() {
        let f = indicator_field();
        assert!((distribution_function(&f, 1.0) - 2.0).abs() < 1e-12);
        assert_eq!(distribution_function(&f, 3.0), 0.0);
        let t = rearrangement(&f);
        assert_eq!(t.eval(0.0), 3.0);
        assert_eq!(t.eval(1.99), 3.0);
        assert_eq!(t.eval(2.0 + 1e-12), 0.0);
        assert_eq!(t.eval(5.0), 0.0);
    }

    #[test]
    fn indicator_weak_norm() {
        let f = indicator_field();
        for p in [1.0, 1.5, 3.0, 6.0] {
            let got = lorentz_quasinorm(&f, &LorentzParams::weak(p).unwrap());
            assert!((got - 3.0 * 2f64.powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_rearrangement() {
        let g = Grid::<f64>::new(8, 1.5).unwrap();
        let f = ScalarField::from_fn(g, |_| -2.5);
        let t = rearrangement(&f);
        assert!(t.values.iter().all(|&v| v == 2.5));
        assert!((t.measure() - g.volume()).abs() < 1e-12);
    }

    #[test]
    fn rearrangement_preserves_multiset() {
        let f = random_field(4);
        let t = rearrangement(&f);
        let mut a: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert_eq!(a, t.values);
        assert!(t.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn diagonal_lorentz_is_lebesgue() {
        for seed in 0..100 {
            let f = random_field(seed);
            for p in [1.0, 2.0, 3.0, 4.5] {
                let a = lorentz_quasinorm(&f, &LorentzParams::new(p, p).unwrap());
                let b = lebesgue_norm(&f, p);
                assert!((a - b).abs() < 1e-10 * b, "p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn second_index_embedding_has_unit_constant() {
        for seed in 0..100 {
            let f = random_field(1000 + seed);
            for p in [1.5, 3.0] {
                let vals: Vec<f64> = [1.0, 2.0, 4.0, f64::INFINITY]
                    .into_iter()
                    .map(|q| lorentz_quasinorm(&f, &LorentzParams::new(p, q).unwrap()))
                    .collect();
                for w in vals.windows(2) {
                    assert!(w[1] <= w[0] * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn chebyshev_bound_holds_on_every_level() {
        let f = random_field(77);
        let p = 2.5;
        let weak = lorentz_quasinorm(&f, &LorentzParams::weak(p).unwrap());
        let max = f.max_abs();
        for i in 0..100 {
            let lambda = max * i as f64 / 100.0;
            let d = distribution_function(&f, lambda);
            assert!(lambda * d.powf(1.0 / p) <= weak * (1.0 + 1e-12));
        }
    }

    #[test]
    fn distribution_is_nonincreasing() {
        let f = random_field(8);
        let max = f.max_abs();
        let d: Vec<f64> = (0..100)
            .map(|i| distribution_function(&f, max * i as f64 / 99.0))
            .collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*d.last().unwrap(), 0.0);
    }

    #[test]
    fn norms_are_homogeneous() {
        let f = random_field(9);
        let a = 3.7;
        let fa = f.scaled(a);
        for params in [
            LorentzParams::new(2.0, 3.0).unwrap(),
            LorentzParams::weak(1.5).unwrap(),
        ] {
            let x = lorentz_quasinorm(&f, &params);
            let y = lorentz_quasinorm(&fa, &params);
            assert!((y - a * x).abs() < 1e-12 * y);
        }
        let x = lebesgue_norm(&f, 3.0);
        assert!((lebesgue_norm(&fa, 3.0) - a * x).abs() < 1e-12 * a * x);
    }

    #[test]
    fn vector_fields_use_euclidean_magnitude() {
        let g = Grid::<f64>::new(8, 1.0).unwrap();
        let v = RealVectorField::from_fn(g, |_| [3.0, 4.0, 0.0]);
        assert_eq!(lebesgue_norm(&v, f64::INFINITY), 5.0);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(LorentzParams::new(0.5, 1.0).is_err());
        assert!(LorentzParams::new(2.0, 0.5).is_err());
    }
}
