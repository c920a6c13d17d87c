use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{check_same_grid, fractional_power, RealVectorField, SpectralScalarField, SpectralVectorField};

/// Terms of the localized energy balance on the ball `B_R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaccioppoliRecord {
    pub radius: f64,
    /// `∫_{B_{R/2}} |(−Δ)^{α/4}u|²`.
    pub local_energy: f64,
    /// `∫ ∇φ_R·(|u|²/2 + P)u`.
    pub flux_term: f64,
    /// `∫ (−Δ)^{α/4}u·(φ_R(−Δ)^{α/4}u − (−Δ)^{α/4}(φ_R u))`.
    pub commutator_term: f64,
    /// `∫ φ_R f·u`.
    pub forcing_term: f64,
    /// `|∫ φ_R|(−Δ)^{α/4}u|² − flux − commutator − forcing|`, the quadrature defect of the balance.
    pub slack: f64,
}

impl CaccioppoliRecord {
    /// `local_energy ≤ flux + commutator + forcing + slack`.
    pub fn holds(&self) -> bool {
        let rhs = self.flux_term + self.commutator_term + self.forcing_term + self.slack;
        self.local_energy <= rhs + 1e-12 * self.local_energy.abs().max(rhs.abs())
    }
}

/// Smooth step with `S(t) = 0` for `t ≤ 0`, `1` for `t ≥ 1`, and its derivative.
fn step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let s = a / (a + b);
    let ds = a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / ((a + b) * (a + b));
    (s, ds)
}

/// Cutoff `φ_R`: 1 on `|x| < R/2`, 0 on `|x| ≥ R`; returns `(φ, dφ/dr)`.
pub fn cutoff(r: f64, radius: f64) -> (f64, f64) {
    let half = radius / 2.0;
    let (s, ds) = step((r - half) / half);
    (1.0 - s, -ds / half)
}

fn dot_sum(a: &RealVectorField<f64>, b: &RealVectorField<f64>, weight: impl Fn(usize) -> f64) -> f64 {
    let mut s = 0.0;
    for flat in 0..a.grid.len() {
        let w = weight(flat);
        if w == 0.0 {
            continue;
        }
        let d: f64 = (0..3).map(|c| a.components[c][flat] * b.components[c][flat]).sum();
        s += w * d;
    }
    s * a.grid.cell_volume()
}

/// Evaluates the localized energy balance of a stationary pair `(u, P)` with force `f`
/// on the ball of radius `R ≤ L/4` centred at the origin.
pub fn caccioppoli_energy(
    u: &SpectralVectorField<f64>,
    pressure: &SpectralScalarField<f64>,
    f: &SpectralVectorField<f64>,
    radius: f64,
    alpha: f64,
) -> Result<CaccioppoliRecord> {
    check_same_grid(&u.grid, &pressure.grid)?;
    check_same_grid(&u.grid, &f.grid)?;
    let g = u.grid;
    let quarter = g.box_length() / 4.0;
    if !(radius > 0.0) || radius > quarter * (1.0 + 1e-12) {
        return Err(Error::InvalidRadius(format!("cutoff radius {radius} must lie in (0, L/4 = {quarter}]")));
    }
    let beta = alpha / 2.0;
    let up = u.to_physical();
    let pp = pressure.to_physical();
    let fp = f.to_physical();
    let v = fractional_power(u, beta)?.to_physical();

    let radii: Vec<f64> = (0..g.len())
        .map(|flat| {
            let x = g.position(flat);
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
        })
        .collect();
    let cut: Vec<(f64, f64)> = radii.iter().map(|&r| cutoff(r, radius)).collect();

    let local_energy = dot_sum(&v, &v, |i| if radii[i] < radius / 2.0 { 1.0 } else { 0.0 });
    let weighted_energy = dot_sum(&v, &v, |i| cut[i].0);

    let mut flux = 0.0;
    for flat in 0..g.len() {
        let dphi = cut[flat].1;
        let r = radii[flat];
        if dphi == 0.0 || r == 0.0 {
            continue;
        }
        let x = g.position(flat);
        let uu: f64 = (0..3).map(|c| up.components[c][flat].powi(2)).sum();
        let q = uu / 2.0 + pp.values[flat];
        let xu: f64 = (0..3).map(|c| x[c] * up.components[c][flat]).sum();
        flux += dphi / r * q * xu;
    }
    let flux_term = flux * g.cell_volume();

    let mut phi_u = up.clone();
    for c in phi_u.components.iter_mut() {
        for (val, &(phi, _)) in c.iter_mut().zip(&cut) {
            *val *= phi;
        }
    }
    let frac_phi_u = fractional_power(&phi_u.to_spectral(), beta)?.to_physical();
    let commutator_term = weighted_energy - dot_sum(&v, &frac_phi_u, |_| 1.0);
    let forcing_term = dot_sum(&fp, &up, |i| cut[i].0);
    let slack = (weighted_energy - flux_term - commutator_term - forcing_term).abs();
    Ok(CaccioppoliRecord {
        radius,
        local_energy,
        flux_term,
        commutator_term,
        forcing_term,
        slack,
    })
}
