use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::{
    check_same_grid, czero, dealias, fractional_power, gradient, pair_index, tensor_products, FracParams,
    SpectralScalarField, SpectralVectorField,
};

fn products<T: Real>(u: &SpectralVectorField<T>, params: &FracParams<T>) -> [Vec<Complex<T>>; 6] {
    let phys = if params.dealias {
        dealias(u).to_physical()
    } else {
        u.to_physical()
    };
    tensor_products(&phys)
}

fn skip<T: Real>(u: &SpectralVectorField<T>, params: &FracParams<T>, flat: usize) -> bool {
    let g = &u.grid;
    flat == 0 || g.touches_nyquist(flat) || (params.dealias && !g.in_dealias_sphere(flat))
}

/// `P = (−Δ)^{−1} div((u·∇)u − f)`, i.e. `P̂ = (−ξξᵀ:(u⊗u)^ − iξ·f̂)/|ξ|²`; mean zero.
pub fn recover_pressure<T: Real>(
    u: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
) -> Result<SpectralScalarField<T>> {
    check_same_grid(&u.grid, &f.grid)?;
    let g = u.grid;
    let prods = products(u, params);
    let mut p = SpectralScalarField::zeros(g);
    for flat in 0..g.len() {
        if skip(u, params, flat) {
            continue;
        }
        let xi = g.wavevector(flat);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let mut quad = czero::<T>();
        let mut fdot = czero::<T>();
        for j in 0..3 {
            fdot += f.components[j][flat] * xi[j];
            for k in 0..3 {
                quad += prods[pair_index(j, k)][flat] * (xi[j] * xi[k]);
            }
        }
        let ifdot = Complex::new(-fdot.im, fdot.re);
        p.coeffs[flat] = -(quad + ifdot) / r2;
    }
    Ok(p)
}

/// `‖(−Δ)^{α/2}u + div(u⊗u) + ∇P − f‖₂`, the unprojected momentum balance.
pub fn momentum_budget<T: Real>(
    u: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    pressure: &SpectralScalarField<T>,
    params: &FracParams<T>,
) -> Result<T> {
    check_same_grid(&u.grid, &f.grid)?;
    check_same_grid(&u.grid, &pressure.grid)?;
    let g = u.grid;
    let prods = products(u, params);
    let mut r = fractional_power(u, params.alpha)?
        .add(&gradient(pressure))?
        .sub(f)?;
    for flat in 0..g.len() {
        if skip(u, params, flat) {
            continue;
        }
        let xi = g.wavevector(flat);
        for (i, c) in r.components.iter_mut().enumerate() {
            let mut s = czero::<T>();
            for (k, &xk) in xi.iter().enumerate() {
                s += prods[pair_index(i, k)][flat] * xk;
            }
            c[flat] += Complex::new(-s.im, s.re);
        }
    }
    Ok(r.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealVectorField};

    #[test]
    fn zero_data_zero_pressure() {
        let g = Grid::new(8, 2.0).unwrap();
        let z = SpectralVectorField::zeros(g);
        let p = recover_pressure(&z, &z, &FracParams::new(2.0, true)).unwrap();
        assert_eq!(p.max_coefficient(), 0.0);
    }

    #[test]
    fn two_plane_waves_match_hand_computation() {
        let l = 2.0 * std::f64::consts::PI;
        let g = Grid::new(16, l).unwrap();
        let k = [1.0, 0.0, 0.0];
        let q = [0.0, 1.0, 1.0];
        let a = [0.0, 0.6, -0.8];
        let b = [1.0, 0.5, -0.5];
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let u = RealVectorField::from_fn(g, |x| {
            let (ck, cq) = (dot(k, x).cos(), dot(q, x).cos());
            [0, 1, 2].map(|i| a[i] * ck + b[i] * cq)
        })
        .to_spectral();
        let z = SpectralVectorField::zeros(g);
        let p = recover_pressure(&u, &z, &FracParams::new(2.0, false)).unwrap().to_physical();
        let kp = [k[0] + q[0], k[1] + q[1], k[2] + q[2]];
        let km = [k[0] - q[0], k[1] - q[1], k[2] - q[2]];
        let c = dot(a, q) * dot(b, k);
        for flat in 0..g.len() {
            let x = g.position(flat);
            let expect = c * (dot(km, x).cos() / dot(km, km) - dot(kp, x).cos() / dot(kp, kp));
            assert!((p.values[flat] - expect).abs() < 1e-13, "{} vs {}", p.values[flat], expect);
        }
    }
}
