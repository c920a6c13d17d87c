use super::Sampled;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::Grid;

/// `max |x − origin|^θ |f(x)|` over the grid with periodic distances.
///
/// For `θ > 0` the cell at the origin (distance zero) carries weight zero and is
/// skipped; for `θ = 0` the weight is identically one.
pub fn weighted_sup_norm<T: Real, F: Sampled<T> + ?Sized>(field: &F, theta: T, origin: [T; 3]) -> T {
    let g = field.grid();
    let mags = field.magnitudes();
    let tiny = g.spacing() * T::lit(1e-9);
    let mut best = T::zero();
    for (flat, &m) in mags.iter().enumerate() {
        let w = if theta == T::zero() {
            T::one()
        } else {
            let r = g.periodic_distance(g.position(flat), origin);
            if r <= tiny {
                continue;
            }
            r.powf(theta)
        };
        best = best.max(w * m);
    }
    best
}

/// Result of a Morrey-type supremum over a family of balls.
#[derive(Clone, Debug, PartialEq)]
pub struct MorreyEstimate<T> {
    pub value: T,
    pub center: [T; 3],
    pub radius: T,
    /// Balls that contained no grid point.
    pub skipped: usize,
}

/// Grid points within periodic distance `r` of `center`.
pub(crate) fn ball_points<T: Real>(g: &Grid<T>, center: [T; 3], r: T) -> Vec<usize> {
    let n = g.n() as i64;
    let h = g.spacing();
    let m = (r / h).ceil().to_i64().unwrap_or(0) + 1;
    let m = m.min((n - 1) / 2);
    let base: Vec<i64> = center
        .iter()
        .map(|&c| (c / h).round().to_i64().unwrap_or(0))
        .collect();
    let r2 = r * r;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let idx = [base[0] + a, base[1] + b, base[2] + c];
                let mut d2 = T::zero();
                for (d, &id) in idx.iter().enumerate() {
                    let x = T::lit(id as f64) * h - center[d];
                    d2 += x * x;
                }
                if d2 <= r2 {
                    let w = idx.map(|v| v.rem_euclid(n) as usize);
                    out.push(g.index(w[0], w[1], w[2]));
                }
            }
        }
    }
    out
}

/// `max_{center,R} R^{3/p} (mean_{B(center,R)} |f|^s)^{1/s}` for `s ∈ {1, 2}`.
pub fn morrey_estimate<T: Real, F: Sampled<T> + ?Sized>(
    field: &F,
    s: u32,
    p: T,
    radii: &[T],
    centers: &[[T; 3]],
) -> Result<MorreyEstimate<T>> {
    let g = field.grid();
    let quarter = g.box_length() / T::lit(4.0);
    if let Some(&bad) = radii
        .iter()
        .find(|&&r| !(r > T::zero()) || r > quarter * (T::one() + T::lit(1e-12)))
    {
        return Err(Error::InvalidRadius(format!(
            "radius {bad} outside (0, L/4 = {quarter}]"
        )));
    }
    let mags = field.magnitudes();
    let mut est = MorreyEstimate {
        value: T::zero(),
        center: [T::zero(); 3],
        radius: T::zero(),
        skipped: 0,
    };
    let sf = T::lit(s as f64);
    for &center in centers {
        for &r in radii {
            let pts = ball_points(g, center, r);
            if pts.is_empty() || r < g.spacing() {
                log::warn!("Morrey ball of radius {r} contains no complete cell; skipped");
                est.skipped += 1;
                continue;
            }
            let mean = pts.iter().map(|&i| mags[i].powi(s as i32)).sum::<T>() / T::from_count(pts.len());
            let v = r.powf(T::lit(3.0) / p) * mean.powf(T::one() / sf);
            if v > est.value || est.radius == T::zero() {
                est.value = v;
                est.center = center;
                est.radius = r;
            }
        }
    }
    Ok(est)
}

/// Discrete `Ṁ^{2,p}` norm.
pub fn morrey_norm<T: Real, F: Sampled<T> + ?Sized>(
    field: &F,
    p: T,
    radii: &[T],
    centers: &[[T; 3]],
) -> Result<T> {
    if !(p > T::lit(2.0)) {
        return Err(Error::InvalidParameter(format!("Morrey exponent p must exceed 2, got {p}")));
    }
    Ok(morrey_estimate(field, 2, p, radii, centers)?.value)
}

/// Upper bound for `‖f‖_{L^p}` from `‖f‖_{L^∞_{θ1}}` and `‖f‖_{L^∞_{θ2}}` with
/// `θ2 < 3/p < θ1`, splitting space at the unit sphere.
pub fn interpolation_bound<T: Real>(a1: T, theta1: T, a2: T, theta2: T, p: T) -> Result<T> {
    let three = T::lit(3.0);
    if !(theta2 * p < three && three < theta1 * p) {
        return Err(Error::InvalidExponents(format!(
            "need θ2 < 3/p < θ1, got θ1 = {theta1}, θ2 = {theta2}, p = {p}"
        )));
    }
    let four_pi = T::lit(4.0) * T::PI();
    let inner = a2.powf(p) * four_pi / (three - p * theta2);
    let outer = a1.powf(p) * four_pi / (p * theta1 - three);
    Ok((inner + outer).powf(T::one() / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lebesgue_norm;
    use crate::spectral::ScalarField;

    fn radius(x: [f64; 3]) -> f64 {
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    #[test]
    fn zero_weight_is_sup_norm() {
        let g = Grid::<f64>::new(16, 4.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (-radius(x)).exp() * (1.0 + x[0]));
        assert_eq!(weighted_sup_norm(&f, 0.0, [0.0; 3]), f.max_abs());
    }

    #[test]
    fn truncated_power_has_unit_norm() {
        let g = Grid::<f64>::new(32, 8.0).unwrap();
        for theta in [0.5, 1.0, 2.0] {
            let f = ScalarField::from_fn(g, |x| 1f64.min(radius(x).powf(-theta)));
            let v = weighted_sup_norm(&f, theta, [0.0; 3]);
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_theta_on_unit_bump() {
        let g = Grid::<f64>::new(16, 8.0).unwrap();
        let f = ScalarField::from_fn(g, |x| if radius(x) < 2.2 { 1.0 } else { 0.0 });
        let theta = 0.7;
        let rmax = (0..g.len())
            .filter(|&i| f.values[i] != 0.0)
            .map(|i| radius(g.position(i)))
            .fold(0.0, f64::max);
        let a = weighted_sup_norm(&f, theta, [0.0; 3]);
        let b = weighted_sup_norm(&f, 2.0 * theta, [0.0; 3]);
        assert!((b - a * rmax.powf(theta)).abs() < 1e-12 * b);
    }

    #[test]
    fn morrey_of_zero_and_constant() {
        let g = Grid::<f64>::new(16, 8.0).unwrap();
        let radii = [0.5, 1.0, 2.0];
        let centers = [[0.0; 3], [1.3, -2.0, 0.4]];
        let z = ScalarField::zeros(g);
        assert_eq!(morrey_norm(&z, 3.0, &radii, &centers).unwrap(), 0.0);
        let c = ScalarField::from_fn(g, |_| 1.5);
        let p = 4.0;
        let est = morrey_estimate(&c, 2, p, &radii, &centers).unwrap();
        assert_eq!(est.radius, 2.0);
        assert!((est.value - 1.5 * 2f64.powf(3.0 / p)).abs() < 1e-12);
    }

    #[test]
    fn morrey_scale_invariant_profile() {
        let g = Grid::<f64>::new(64, 16.0).unwrap();
        let h = g.spacing();
        let p = 4.0;
        let f = ScalarField::from_fn(g, |x| radius(x).max(h).powf(-3.0 / p));
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| morrey_norm(&f, p, &[r], &[[0.0; 3]]).unwrap())
            .collect();
        let hi = vals.iter().cloned().fold(0.0, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.0, "{vals:?}");
    }

    #[test]
    fn morrey_skips_empty_balls_and_rejects_large_radii() {
        let g = Grid::<f64>::new(16, 8.0).unwrap();
        let c = ScalarField::from_fn(g, |_| 1.0);
        let est = morrey_estimate(&c, 2, 3.0, &[0.1, 1.0], &[[0.25, 0.25, 0.25]]).unwrap();
        assert_eq!(est.skipped, 1);
        assert!(matches!(
            morrey_norm(&c, 3.0, &[2.5], &[[0.0; 3]]),
            Err(Error::InvalidRadius(_))
        ));
    }

    #[test]
    fn lp_controlled_by_two_weighted_norms() {
        let g = Grid::<f64>::new(32, 16.0).unwrap();
        let (t1, t2) = (2.0, 0.5);
        for p in [2.0, 3.0, 5.0] {
            let f = ScalarField::from_fn(g, |x| {
                let r = radius(x);
                if r == 0.0 {
                    0.0
                } else {
                    1.0 / (r.powf(t2) + r.powf(t1))
                }
            });
            let a1 = weighted_sup_norm(&f, t1, [0.0; 3]);
            let a2 = weighted_sup_norm(&f, t2, [0.0; 3]);
            let bound = interpolation_bound(a1, t1, a2, t2, p).unwrap();
            let lp = lebesgue_norm(&f, p);
            assert!(lp.is_finite() && lp <= bound, "p={p}: {lp} > {bound}");
        }
        assert!(interpolation_bound(1.0, 1.0, 1.0, 0.5, 2.0).is_err());
    }
}
