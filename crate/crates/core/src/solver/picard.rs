use serde::{Deserialize, Serialize};

use super::pressure::recover_pressure;
use crate::error::{Error, Result};
use crate::norms::{lorentz_quasinorm, LorentzParams};
use crate::scalar::Real;
use crate::spectral::{
    advection_term, bilinear_from_physical, check_same_grid, dealias, fractional_power, leray_project,
    FracParams, RealVectorField, SpectralScalarField, SpectralVectorField,
};

/// Stopping rules for the fixed-point iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SolverConfig<T = f64> {
    pub params: FracParams<T>,
    /// Relative `L²` change below which the iteration stops.
    #[serde(default = "default_tol")]
    pub tol_rel: T,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Iterates larger than this multiple of `‖u₀‖` count as divergence.
    #[serde(default = "default_divergence_factor")]
    pub divergence_factor: T,
}

fn default_tol<T: Real>() -> T {
    T::lit(1e-12)
}

fn default_max_iter() -> usize {
    200
}

fn default_divergence_factor<T: Real>() -> T {
    T::lit(1e3)
}

impl<T: Real> SolverConfig<T> {
    pub fn new(params: FracParams<T>) -> Self {
        Self {
            params,
            tol_rel: default_tol(),
            max_iter: default_max_iter(),
            divergence_factor: default_divergence_factor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate_steady()?;
        if !(self.tol_rel > T::zero() && self.tol_rel < T::one()) {
            return Err(Error::InvalidParameter(format!("tol_rel must lie in (0, 1), got {}", self.tol_rel)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.divergence_factor > T::one()) {
            return Err(Error::InvalidParameter("divergence_factor must exceed 1".into()));
        }
        Ok(())
    }
}

/// Convergence record and smallness diagnostics of one solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverDiagnostics<T = f64> {
    pub iterations: usize,
    /// Relative `L²` change `‖u_{n+1} − u_n‖/‖u_{n+1}‖` per iteration.
    pub residual_history: Vec<T>,
    /// `‖u₀‖` in weak-`L^{3/(α−1)}`.
    pub lifted_force_lorentz_norm: T,
    /// `‖u‖` in weak-`L^{3/(α−1)}`.
    pub solution_lorentz_norm: T,
    /// `‖B(u,u)‖/‖u‖²` in weak-`L^{3/(α−1)}`.
    pub empirical_bilinear_constant: T,
    /// `4 ‖u₀‖ C_B`.
    pub contraction_product: T,
    /// `‖u‖ ≤ 2‖u₀‖` in the critical weak norm.
    pub within_two_ball: bool,
    /// Absolute `L²` size of the last Picard update.
    pub final_change: T,
}

/// Velocity, pressure and diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadySolution<T = f64> {
    pub velocity: SpectralVectorField<T>,
    pub pressure: SpectralScalarField<T>,
    pub diagnostics: SolverDiagnostics<T>,
}

/// `u₀ = (−Δ)^{−α/2} ℙ f`.
pub fn lift_force<T: Real>(f: &SpectralVectorField<T>, params: &FracParams<T>) -> Result<SpectralVectorField<T>> {
    fractional_power(&leray_project(f), -params.alpha)
}

fn weak_norm<T: Real>(u: &RealVectorField<T>, params: &FracParams<T>) -> Result<T> {
    Ok(lorentz_quasinorm(u, &LorentzParams::weak(params.critical_exponent())?))
}

fn velocity_for_products<T: Real>(u: &SpectralVectorField<T>, params: &FracParams<T>) -> RealVectorField<T> {
    if params.dealias {
        dealias(u).to_physical()
    } else {
        u.to_physical()
    }
}

/// Runs the Picard iteration until the relative `L²` update drops below `tol_rel`.
pub fn solve_steady<T: Real>(f: &SpectralVectorField<T>, config: &SolverConfig<T>) -> Result<SteadySolution<T>> {
    config.validate()?;
    let params = &config.params;
    let u0 = lift_force(f, params)?;
    let u0_phys = velocity_for_products(&u0, params);
    let u0_norm = u0.l2_norm();
    let limit = config.divergence_factor * u0_norm;

    let mut u = u0.clone();
    let mut u_phys = u0_phys.clone();
    let mut history = Vec::new();
    let mut last_change = T::zero();
    let mut converged = false;
    for it in 1..=config.max_iter {
        let b = bilinear_from_physical(&u_phys, params)?;
        let b_phys = b.to_physical();
        let u_next = u0.add(&b)?;
        let next_phys = u0_phys.add(&b_phys)?;
        let change = u_next.sub(&u)?.l2_norm();
        let size = u_next.l2_norm();
        if !size.is_finite() || !change.is_finite() || size > limit {
            return Err(Error::Diverged {
                iterations: it,
                ratio: (size / u0_norm).as_f64(),
            });
        }
        let rel = if size == T::zero() { T::zero() } else { change / size };
        history.push(rel);
        last_change = change;
        u = u_next;
        u_phys = next_phys;
        log::debug!("picard iteration {it}: relative change {rel:e}");
        if rel < config.tol_rel {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations: config.max_iter,
            last_change: history.last().map_or(f64::NAN, |v| v.as_f64()),
        });
    }

    let delta = weak_norm(&u0.to_physical(), params)?;
    let sol_norm = weak_norm(&u.to_physical(), params)?;
    let b = bilinear_from_physical(&u_phys, params)?;
    let b_norm = weak_norm(&b.to_physical(), params)?;
    let cb = if sol_norm > T::zero() {
        b_norm / (sol_norm * sol_norm)
    } else {
        T::zero()
    };
    let within = sol_norm <= T::lit(2.0) * delta * T::lit(1.0 + 1e-6);
    if !within {
        log::warn!("solution weak norm {sol_norm:e} leaves the ball of radius 2‖u₀‖ = {:e}", T::lit(2.0) * delta);
    }
    let pressure = recover_pressure(&u, f, params)?;
    Ok(SteadySolution {
        velocity: u,
        pressure,
        diagnostics: SolverDiagnostics {
            iterations: history.len(),
            residual_history: history,
            lifted_force_lorentz_norm: delta,
            solution_lorentz_norm: sol_norm,
            empirical_bilinear_constant: cb,
            contraction_product: T::lit(4.0) * delta * cb,
            within_two_ball: within,
            final_change: last_change,
        },
    })
}

fn residual_field<T: Real>(
    u: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    include_bilinear: bool,
) -> Result<SpectralVectorField<T>> {
    check_same_grid(&u.grid, &f.grid)?;
    let mut r = fractional_power(u, params.alpha)?.sub(&leray_project(f))?;
    if include_bilinear {
        let adv = advection_term(&velocity_for_products(u, params), params.dealias);
        r = r.add(&adv)?;
    }
    Ok(r)
}

/// `‖(−Δ)^{α/2}u + ℙ div(u⊗u) − ℙ f‖₂`.
pub fn residual<T: Real>(u: &SpectralVectorField<T>, f: &SpectralVectorField<T>, params: &FracParams<T>) -> Result<T> {
    Ok(residual_field(u, f, params, true)?.l2_norm())
}

/// Relative residual of the rescaled pair `(λ^{α−1}u(λ·), λ^{2α−1}f(λ·))` on the box `L/λ`.
pub fn scaling_check<T: Real>(
    u: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    lambda: usize,
) -> Result<T> {
    scaling_check_with(u, f, params, lambda, true)
}

/// [`scaling_check`] with the option of dropping the quadratic term.
pub fn scaling_check_with<T: Real>(
    u: &SpectralVectorField<T>,
    f: &SpectralVectorField<T>,
    params: &FracParams<T>,
    lambda: usize,
    include_bilinear: bool,
) -> Result<T> {
    check_same_grid(&u.grid, &f.grid)?;
    let n = u.grid.n();
    if lambda < 2 || n % lambda != 0 {
        return Err(Error::InvalidGrid(format!("scaling factor {lambda} must be >= 2 and divide n = {n}")));
    }
    let lam = T::from_count(lambda);
    let small = u.grid.rescaled(lam)?;
    let ul = u.with_grid(small)?.scaled(lam.powf(params.alpha - T::one()));
    let fl = f.with_grid(small)?.scaled(lam.powf(T::lit(2.0) * params.alpha - T::one()));
    let scale = fractional_power(u, params.alpha)?.l2_norm() + leray_project(f).l2_norm();
    if scale == T::zero() {
        return Ok(T::zero());
    }
    let r = residual_field(&ul, &fl, params, include_bilinear)?.l2_norm();
    // L² norms on the small box carry an extra λ^{−3/2}
    let expected = lam.powf(T::lit(2.0) * params.alpha - T::one() - T::lit(1.5));
    Ok(r / (expected * scale))
}
