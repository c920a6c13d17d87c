use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fracns_core::asymptotics::{
    build_kernel, fit_decay_exponent, nonexistence_certificate, profile_decomposition, profile_term, ProfileOptions,
};
use fracns_core::evolver::{drift_from, kernel_l1_check, stationarity_check, StationarityReport};
use fracns_core::forces::{make_force, moment_matrix};
use fracns_core::norms::{lebesgue_norm, lorentz_quasinorm, morrey_norm, weighted_sup_norm, LorentzParams};
use fracns_core::solver::{lift_force, residual, solve_steady};
use fracns_core::spectral::{dealias, fractional_power, leray_project};
use fracns_core::{Grid, RealVectorField, SpectralVectorField, SteadySolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, RunConfig};
use crate::error::RunError;
use crate::output::{csv_text, radial_csv, write_atomic};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";

/// Outcome of one invocation, written as `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    /// `ok`, or the name of the error that stopped the run.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config_echo: RunConfig,
    pub metrics: BTreeMap<String, f64>,
    /// Emitted files, relative to the output directory.
    pub artifacts: Vec<String>,
    /// Seconds; not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

struct Context<'a> {
    config: &'a RunConfig,
    dir: PathBuf,
    metrics: BTreeMap<String, f64>,
    artifacts: Vec<String>,
}

impl Context<'_> {
    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.metric(key, if value { 1.0 } else { 0.0 });
    }

    fn emit_csv(&mut self, name: &str, text: String) -> Result<(), RunError> {
        if self.config.emit.csv {
            write_atomic(&self.dir.join(name), text.as_bytes())?;
            self.artifacts.push(name.to_string());
        }
        Ok(())
    }

    fn grid(&self) -> Result<Grid, RunError> {
        self.config.grid()
    }

    fn force(&self) -> Result<SpectralVectorField, RunError> {
        let g = self.grid()?;
        if self.config.force.amplitude == 0.0 {
            return Ok(SpectralVectorField::zeros(g));
        }
        Ok(make_force(&self.config.force_spec(), &g, &self.config.frac)?)
    }

    fn solve(&mut self) -> Result<(SpectralVectorField, SteadySolution), RunError> {
        let f = self.force()?;
        let params = self.config.frac;
        let sol = solve_steady(&f, &self.config.solver_config())?;
        let d = &sol.diagnostics;
        let res = residual(&sol.velocity, &f, &params)?;
        let scale = fractional_power(&sol.velocity, params.alpha)?.l2_norm() + leray_project(&f).l2_norm();
        let u = sol.velocity.to_physical();
        self.metric("iterations", d.iterations as f64);
        self.metric("residual", res);
        self.metric("relative_residual", if scale > 0.0 { res / scale } else { 0.0 });
        self.metric("final_change", d.final_change);
        self.metric("contraction_product", d.contraction_product);
        self.metric("bilinear_constant", d.empirical_bilinear_constant);
        self.metric("lifted_force_norm", d.lifted_force_lorentz_norm);
        self.metric("solution_norm", d.solution_lorentz_norm);
        self.flag("within_two_ball", d.within_two_ball);
        self.metric("velocity_l2", u.l2_norm());
        self.metric("velocity_linf", u.max_abs());
        self.metric("pressure_l2", sol.pressure.l2_norm());
        Ok((f, sol))
    }

    fn options(&self) -> ProfileOptions {
        ProfileOptions {
            bins: self.config.analysis.bins,
            statistic: self.config.analysis.statistic,
        }
    }
}

/// Runs the configured experiment and writes its outputs.
///
/// The report is written even when a module error stops the run; its `status`
/// then names the error.
pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let start = Instant::now();
    let mut ctx = Context {
        config,
        dir: config.resolved_output_dir(),
        metrics: BTreeMap::new(),
        artifacts: Vec::new(),
    };
    log::info!("running {} into {}", config.experiment, ctx.dir.display());
    let outcome = dispatch(&mut ctx);
    let mut report = RunReport {
        schema: SCHEMA_VERSION,
        status: "ok".into(),
        error: None,
        config_echo: config.clone(),
        metrics: ctx.metrics,
        artifacts: ctx.artifacts,
        wall_time: 0.0,
    };
    if let Err(e) = &outcome {
        report.status = e.name().into();
        report.error = Some(e.to_string());
    }
    if config.emit.json {
        report.artifacts.push(REPORT_FILE.into());
        write_report(&report, &ctx.dir)?;
    }
    report.wall_time = start.elapsed().as_secs_f64();
    log::info!("{} finished in {:.2} s with status {}", config.experiment, report.wall_time, report.status);
    outcome.map(|_| report)
}

fn write_report(report: &RunReport, dir: &Path) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| RunError::Config(e.to_string()))?;
    text.push('\n');
    write_atomic(&dir.join(REPORT_FILE), text.as_bytes())?;
    Ok(())
}

fn dispatch(ctx: &mut Context<'_>) -> Result<(), RunError> {
    match ctx.config.experiment {
        Experiment::Solve => solve(ctx),
        Experiment::Decay => decay(ctx),
        Experiment::Profile => profile(ctx),
        Experiment::Nonexist => nonexist(ctx),
        Experiment::Evolve => evolve(ctx),
        Experiment::Norms => norms(ctx),
        Experiment::Kernel => kernel(ctx),
    }
}

fn solve(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (_, sol) = ctx.solve()?;
    let rows = sol
        .diagnostics
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, &c)| vec![(i + 1) as f64, c]);
    ctx.emit_csv("convergence.csv", csv_text(&["iteration", "relative_change"], rows))
}

fn decay(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (_, sol) = ctx.solve()?;
    let window = ctx.config.window();
    let p = fit_decay_exponent(&sol.velocity.to_physical(), window, &ctx.options())?;
    ctx.metric("target_exponent", 4.0 - ctx.config.frac.alpha);
    ctx.metric("fitted_exponent", p.fitted_exponent);
    ctx.metric("fit_stderr", p.fit_stderr);
    ctx.metric("fit_prefactor", p.fit_prefactor);
    ctx.metric("window_lo", window.0);
    ctx.metric("window_hi", window.1);
    ctx.emit_csv("decay_profile.csv", radial_csv(&p))
}

fn profile(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (f, sol) = ctx.solve()?;
    let alpha = ctx.config.frac.alpha;
    let a = &ctx.config.analysis;
    let window = ctx.config.window();
    let u0 = lift_force(&f, &ctx.config.frac)?;
    let m = moment_matrix(&sol.velocity.to_physical());
    let kernel = build_kernel(alpha, a.kernel_grid)?;
    let d = profile_decomposition(&sol.velocity, &u0, &m, &kernel, window, a.profile_term, &ctx.options())?;
    let term = profile_term(&sol.velocity.grid, &m, &kernel, a.profile_term);
    let t = fit_decay_exponent(&term, window, &ctx.options())?;
    ctx.metric("target_exponent", 4.0 - alpha);
    ctx.metric("remainder_exponent", d.profile.fitted_exponent);
    ctx.metric("remainder_stderr", d.profile.fit_stderr);
    ctx.metric("profile_term_exponent", t.fitted_exponent);
    ctx.metric("moment_deviation", m.deviatoric_norm());
    ctx.emit_csv("profile_remainder.csv", radial_csv(&d.profile))?;
    ctx.emit_csv("profile_term.csv", radial_csv(&t))
}

fn nonexist(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (_, sol) = ctx.solve()?;
    let kernel = build_kernel(ctx.config.frac.alpha, ctx.config.analysis.kernel_grid)?;
    let c = nonexistence_certificate(&sol, &kernel, &ctx.config.analysis.floors);
    let m = moment_matrix(&sol.velocity.to_physical());
    for i in 0..3 {
        for j in i..3 {
            ctx.metric(&format!("moment_{i}{j}"), m.entries[i][j]);
        }
    }
    ctx.metric("deviation", c.deviation);
    ctx.metric("relative_deviation", c.relative_deviation);
    ctx.metric("leading_lower_bound", c.leading_lower_bound);
    ctx.metric("relative_lower_bound", c.relative_lower_bound);
    ctx.metric("kernel_bound", kernel.bound);
    ctx.flag("affirmative", c.affirmative);
    Ok(())
}

/// Mean-free, dealiased, divergence-free noise with `‖·‖₂ = size`.
fn solenoidal_noise(grid: Grid, seed: u64, size: f64) -> SpectralVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = RealVectorField::zeros(grid);
    for c in v.components.iter_mut() {
        c.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        c.iter_mut().for_each(|x| *x -= mean);
    }
    let n = leray_project(&dealias(&v.to_spectral()));
    let norm = n.l2_norm();
    n.scaled(if norm > 0.0 { size / norm } else { 0.0 })
}

fn evolve(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (f, sol) = ctx.solve()?;
    let e = ctx.config.evolve;
    let params = ctx.config.frac;
    let report: StationarityReport = if e.perturbation > 0.0 {
        let u = &sol.velocity;
        let base = if u.l2_norm() > 0.0 { u.l2_norm() } else { 1.0 };
        let noise = solenoidal_noise(u.grid, ctx.config.seed, e.perturbation * base);
        let v0 = u.add(&noise)?;
        drift_from(u, &v0, &f, &params, e.t_end, e.dt)?
    } else {
        stationarity_check(&sol, &f, &params, e.t_end, e.dt)?
    };
    ctx.metric("steps", (report.times.len() - 1) as f64);
    ctx.metric("max_drift", report.max_drift);
    ctx.metric("final_drift", *report.drift_history.last().unwrap_or(&0.0));
    let rows = report.times.iter().zip(&report.drift_history).map(|(&t, &d)| vec![t, d]);
    ctx.emit_csv("drift_history.csv", csv_text(&["t", "drift"], rows))
}

fn norms(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let (f, sol) = ctx.solve()?;
    let params = ctx.config.frac;
    let g = sol.velocity.grid;
    let u = sol.velocity.to_physical();
    let p = params.critical_exponent();
    let weak = LorentzParams::weak(p)?;
    let radii: Vec<f64> = {
        let (lo, hi) = (2.0 * g.spacing(), g.box_length() / 4.0);
        (0..6).map(|i| lo * (hi / lo).powf(i as f64 / 5.0)).collect()
    };
    ctx.metric("critical_exponent", p);
    ctx.metric("norm_l2", lebesgue_norm(&u, 2.0));
    ctx.metric("norm_linf", u.max_abs());
    ctx.metric("norm_weak_critical", lorentz_quasinorm(&u, &weak));
    ctx.metric("norm_strong_critical", lebesgue_norm(&u, p));
    ctx.metric("norm_weighted_sup", weighted_sup_norm(&u, 4.0 - params.alpha, [0.0; 3]));
    ctx.metric("norm_morrey", morrey_norm(&u, p, &radii, &[[0.0; 3]])?);
    let u0 = lift_force(&f, &params)?.to_physical();
    ctx.metric("lift_weak_critical", lorentz_quasinorm(&u0, &weak));
    Ok(())
}

fn kernel(ctx: &mut Context<'_>) -> Result<(), RunError> {
    let k = &ctx.config.kernel;
    let g = Grid::new(k.grid.n, k.grid.box_length).map_err(RunError::Validation)?;
    let rows = kernel_l1_check(ctx.config.frac.alpha, &k.times, &g)?;
    let variation = |col: &dyn Fn(&fracns_core::evolver::KernelL1Row) -> f64| {
        let max = rows.iter().map(col).fold(f64::NEG_INFINITY, f64::max);
        let min = rows.iter().map(col).fold(f64::INFINITY, f64::min);
        (max - min) / max
    };
    let heat_error = rows.iter().map(|r| (r.heat - 1.0).abs()).fold(0.0, f64::max);
    let (gv, pv) = (variation(&|r| r.gradient), variation(&|r| r.projected));
    ctx.metric("heat_mass_error", heat_error);
    ctx.metric("gradient_variation", gv);
    ctx.metric("projected_variation", pv);
    let table = rows.iter().map(|r| vec![r.t, r.heat, r.gradient, r.projected]);
    let text = csv_text(&["t", "heat", "gradient", "projected"], table);
    ctx.emit_csv("kernel_l1.csv", text)
}
