use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::lift_force;
use crate::spectral::{
    advection_term, check_same_grid, dealias, leray_project, FracParams, SpectralVectorField,
};

/// Which states a [`Trajectory`] keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StateStorage {
    /// Every step.
    #[default]
    All,
    /// Only the initial and the final state.
    Endpoints,
}

/// Time samples and states of a mild solution.
#[derive(Clone, Debug)]
pub struct Trajectory<T = f64> {
    pub times: Vec<T>,
    pub states: Vec<SpectralVectorField<T>>,
    /// `‖v(tₙ) − v₀‖₂ / ‖v₀‖₂` per step (absolute when `v₀ = 0`).
    pub drift_history: Vec<T>,
    /// `‖v(tₙ)‖₂` per step.
    pub energy_history: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &SpectralVectorField<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Advective step bound `0.5 h / max|v|`; infinite for `v = 0`.
pub fn stability_bound<T: Real>(v: &SpectralVectorField<T>) -> T {
    let vmax = v.to_physical().max_abs();
    if vmax == T::zero() {
        T::infinity()
    } else {
        T::lit(0.5) * v.grid.spacing() / vmax
    }
}

/// `φ₁(z) = (1 − e^{−z})/z` and `φ₂(z) = (e^{−z} − 1 + z)/z²`.
fn phi<T: Real>(z: T) -> (T, T) {
    if z < T::lit(1e-3) {
        let z2 = z * z;
        let phi1 = T::one() - z / T::lit(2.0) + z2 / T::lit(6.0) - z2 * z / T::lit(24.0);
        let phi2 = T::lit(0.5) - z / T::lit(6.0) + z2 / T::lit(24.0) - z2 * z / T::lit(120.0);
        (phi1, phi2)
    } else {
        let em1 = (-z).exp_m1();
        (-em1 / z, (em1 + z) / (z * z))
    }
}

struct Propagator<T> {
    decay: Vec<T>,
    phi1: Vec<T>,
    phi2: Vec<T>,
}

impl<T: Real> Propagator<T> {
    fn new(v: &SpectralVectorField<T>, alpha: T, dt: T) -> Self {
        let g = v.grid;
        let mut decay = Vec::with_capacity(g.len());
        let mut phi1 = Vec::with_capacity(g.len());
        let mut phi2 = Vec::with_capacity(g.len());
        for flat in 0..g.len() {
            let xi = g.wavevector(flat);
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            let z = if flat == 0 { T::zero() } else { dt * r.powf(alpha) };
            let (a, b) = phi(z);
            decay.push((-z).exp());
            phi1.push(a * dt);
            phi2.push(b * dt);
        }
        Self { decay, phi1, phi2 }
    }
}

/// `N(v) = ℙf − ℙ div(v⊗v)`.
fn nonlinear<T: Real>(
    v: &SpectralVectorField<T>,
    pf: &SpectralVectorField<T>,
    params: &FracParams<T>,
) -> Result<SpectralVectorField<T>> {
    let phys = if params.dealias {
        dealias(v).to_physical()
    } else {
        v.to_physical()
    };
    if !phys.is_finite() {
        return Err(Error::NumericalBlowup("velocity not finite".into()));
    }
    pf.sub(&advection_term(&phys, params.dealias))
}

/// Integrates `∂ₜv + (−Δ)^{α/2}v + ℙ div(v⊗v) = ℙf` from `v₀` to time `t_end`.
pub fn evolve_mild<T: Real>(
    v0: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    t_end: T,
    dt: T,
) -> Result<Trajectory<T>> {
    evolve_mild_with(v0, f, params, t_end, dt, StateStorage::All)
}

/// [`evolve_mild`] with control over the stored states.
///
/// Each step is the second-order exponential integrator
/// `aₙ = e^{−hL}vₙ + hφ₁(hL)N(vₙ)`,
/// `vₙ₊₁ = aₙ + hφ₂(hL)(N(aₙ) − N(vₙ))`, with `L = (−Δ)^{α/2}` applied exactly.
pub fn evolve_mild_with<T: Real>(
    v0: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    t_end: T,
    dt: T,
    storage: StateStorage,
) -> Result<Trajectory<T>> {
    evolve_mild_observed(v0, f, params, t_end, dt, storage, |_, _| Ok(()))
}

/// [`evolve_mild_with`] that also hands every state, including `v₀`, to `observe`.
pub(crate) fn evolve_mild_observed<T: Real>(
    v0: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    t_end: T,
    dt: T,
    storage: StateStorage,
    mut observe: impl FnMut(T, &SpectralVectorField<T>) -> Result<()>,
) -> Result<Trajectory<T>> {
    check_same_grid(&v0.grid, &f.grid)?;
    if !(t_end > T::zero() && t_end.is_finite()) {
        return Err(Error::InvalidTimeStep(format!("final time must be positive, got {t_end}")));
    }
    if !(dt > T::zero()) {
        return Err(Error::InvalidTimeStep(format!("time step must be positive, got {dt}")));
    }
    let bound = stability_bound(v0);
    if dt > bound {
        return Err(Error::InvalidTimeStep(format!("dt = {dt} exceeds the advective bound {bound}")));
    }
    let g = v0.grid;
    let steps = (t_end / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
    let h = t_end / T::from_count(steps);
    let prop = Propagator::new(v0, params.alpha, h);
    let pf = leray_project(f);

    let v0_norm = v0.l2_norm();
    let reference = if v0_norm > T::zero() {
        v0_norm
    } else {
        lift_force(f, params).map(|u| u.l2_norm()).unwrap_or(T::zero())
    };
    let limit = T::lit(1e6) * reference;
    let drift_scale = if v0_norm > T::zero() { v0_norm } else { T::one() };

    let mut traj = Trajectory {
        times: vec![T::zero()],
        states: vec![v0.clone()],
        drift_history: vec![T::zero()],
        energy_history: vec![v0_norm],
    };
    observe(T::zero(), v0)?;
    let mut v = v0.clone();
    for step in 1..=steps {
        let nv = nonlinear(&v, &pf, params)?;
        let mut a = SpectralVectorField::zeros(g);
        for c in 0..3 {
            for flat in 0..g.len() {
                a.components[c][flat] = v.components[c][flat] * prop.decay[flat] + nv.components[c][flat] * prop.phi1[flat];
            }
        }
        let na = nonlinear(&a, &pf, params)?;
        for c in 0..3 {
            for flat in 0..g.len() {
                let corr = (na.components[c][flat] - nv.components[c][flat]) * prop.phi2[flat];
                a.components[c][flat] += corr;
            }
        }
        v = a;
        let size = v.l2_norm();
        if !size.is_finite() || (reference > T::zero() && size > limit) {
            return Err(Error::NumericalBlowup(format!(
                "norm {size:e} at step {step} exceeds 1e6 times the reference {reference:e}"
            )));
        }
        observe(h * T::from_count(step), &v)?;
        traj.times.push(h * T::from_count(step));
        traj.drift_history.push(v.sub(v0)?.l2_norm() / drift_scale);
        traj.energy_history.push(size);
        if storage == StateStorage::All || step == steps {
            traj.states.push(v.clone());
        }
    }
    Ok(traj)
}
