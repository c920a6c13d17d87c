//! Picard iteration `u_{n+1} = u₀ + B(u_n, u_n)` for the stationary problem, with
//! pressure recovery and residual diagnostics.

mod picard;
mod pressure;

pub use picard::{
    lift_force, residual, scaling_check, scaling_check_with, solve_steady, SolverConfig, SolverDiagnostics,
    SteadySolution,
};
pub use pressure::{momentum_budget, recover_pressure};
