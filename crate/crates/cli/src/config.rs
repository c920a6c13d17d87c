use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fracns_core::asymptotics::{CertificateFloors, ProfileTerm, ShellStatistic, DEFAULT_KERNEL_GRID};
use fracns_core::forces::ForceSpec;
use fracns_core::{FracParams, Grid, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

/// Environment variable naming the default output root.
pub const OUTPUT_DIR_ENV: &str = "FRACNS_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Solve,
    Decay,
    Profile,
    Nonexist,
    Evolve,
    Norms,
    Kernel,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Solve,
        Experiment::Decay,
        Experiment::Profile,
        Experiment::Nonexist,
        Experiment::Evolve,
        Experiment::Norms,
        Experiment::Kernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Decay => "decay",
            Experiment::Profile => "profile",
            Experiment::Nonexist => "nonexist",
            Experiment::Evolve => "evolve",
            Experiment::Norms => "norms",
            Experiment::Kernel => "kernel",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| RunError::Usage(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub box_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 128, box_length: 32.0 }
    }
}

/// Stopping rules for the steady solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol_rel: f64,
    pub max_iter: usize,
    pub divergence_factor: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::new(FracParams::new(1.5, true));
        Self {
            tol_rel: c.tol_rel,
            max_iter: c.max_iter,
            divergence_factor: c.divergence_factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitConfig {
    pub csv: bool,
    pub json: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        Self { csv: true, json: true }
    }
}

/// Far-field fitting and certificate settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub bins: usize,
    pub statistic: ShellStatistic,
    /// Fit window; defaults to `(0.125 L, 0.24 L)`.
    pub window: Option<(f64, f64)>,
    pub profile_term: ProfileTerm,
    /// Auxiliary grid for the homogeneous kernel.
    pub kernel_grid: usize,
    pub floors: CertificateFloors,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            bins: 12,
            statistic: ShellStatistic::Mean,
            window: None,
            profile_term: ProfileTerm::Periodic,
            kernel_grid: DEFAULT_KERNEL_GRID,
            floors: CertificateFloors::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub t_end: f64,
    pub dt: f64,
    /// Relative size of the divergence-free noise added to the steady state.
    pub perturbation: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt: 0.05,
            perturbation: 0.0,
        }
    }
}

/// Grid and time sweep of the `kernel` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub times: Vec<f64>,
    pub grid: GridConfig,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            times: vec![0.05, 0.1, 0.2, 0.4],
            grid: GridConfig { n: 128, box_length: 16.0 },
        }
    }
}

fn default_force() -> ForceSpec {
    ForceSpec::annulus_ring(0.1, 0)
}

fn default_frac() -> FracParams {
    FracParams::new(1.5, true)
}

/// One experiment invocation. Every section has defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_frac")]
    pub frac: FracParams,
    /// `amplitude = 0` selects the zero force.
    #[serde(default = "default_force")]
    pub force: ForceSpec,
    #[serde(default)]
    pub solver: SolverSection,
    /// Falls back to `$FRACNS_OUTPUT_DIR`, then `fracns-out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub emit: EmitConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            grid: GridConfig::default(),
            frac: default_frac(),
            force: default_force(),
            solver: SolverSection::default(),
            output_dir: None,
            seed: 0,
            emit: EmitConfig::default(),
            analysis: AnalysisConfig::default(),
            evolve: EvolveConfig::default(),
            kernel: KernelConfig::default(),
        }
    }

    /// Parses a TOML document and applies `overrides` on top of it.
    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self, RunError> {
        let mut table: toml::Table = text.parse().map_err(|e| RunError::Config(format!("{e}")))?;
        if let Some(e) = overrides.experiment {
            table.insert("experiment".into(), e.name().into());
        }
        if !table.contains_key("experiment") {
            return Err(RunError::Usage("no experiment given".into()));
        }
        if let Some(toml::Value::String(name)) = table.get("experiment") {
            name.parse::<Experiment>()?;
        }
        let mut config: RunConfig = table.try_into().map_err(|e| RunError::Config(format!("{e}")))?;
        config.apply(overrides);
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(e) = overrides.experiment {
            self.experiment = e;
        }
        if let Some(a) = overrides.alpha {
            self.frac.alpha = a;
        }
        if let Some(n) = overrides.n {
            self.grid.n = n;
        }
        if let Some(a) = overrides.amplitude {
            self.force.amplitude = a;
        }
        if let Some(s) = overrides.seed {
            self.seed = s;
        }
        if let Some(d) = &overrides.output_dir {
            self.output_dir = Some(d.clone());
        }
    }

    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("fracns-out"))
    }

    pub fn grid(&self) -> Result<Grid, RunError> {
        Grid::new(self.grid.n, self.grid.box_length).map_err(RunError::Validation)
    }

    /// The force spec with the run seed substituted.
    pub fn force_spec(&self) -> ForceSpec {
        ForceSpec {
            seed: self.seed,
            ..self.force.clone()
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            params: self.frac,
            tol_rel: self.solver.tol_rel,
            max_iter: self.solver.max_iter,
            divergence_factor: self.solver.divergence_factor,
        }
    }

    pub fn window(&self) -> (f64, f64) {
        self.analysis.window.unwrap_or((0.125 * self.grid.box_length, 0.24 * self.grid.box_length))
    }

    /// Checks every field the chosen experiment reads.
    pub fn validate(&self) -> Result<(), RunError> {
        let invalid = |msg: String| Err(RunError::Validation(fracns_core::Error::InvalidParameter(msg)));
        let wrap = |r: fracns_core::Result<()>| r.map_err(RunError::Validation);
        if self.experiment == Experiment::Kernel {
            wrap(self.frac.validate_kernel())?;
            Grid::new(self.kernel.grid.n, self.kernel.grid.box_length).map_err(RunError::Validation)?;
            if self.kernel.times.is_empty() || self.kernel.times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                return invalid("kernel times must be positive and finite".into());
            }
            return Ok(());
        }
        let grid = self.grid()?;
        wrap(self.solver_config().validate())?;
        if !(self.force.amplitude >= 0.0) {
            return invalid(format!("force amplitude must be >= 0, got {}", self.force.amplitude));
        }
        if self.force.amplitude > 0.0 {
            wrap(self.force.validate_on(&grid))?;
        }
        let needs_analysis = matches!(self.experiment, Experiment::Decay | Experiment::Profile | Experiment::Nonexist);
        if needs_analysis {
            if self.analysis.bins < 8 {
                return invalid(format!("at least 8 bins required, got {}", self.analysis.bins));
            }
            let (lo, hi) = self.window();
            let quarter = grid.box_length() / 4.0;
            if !(lo > 0.0 && hi > lo && hi <= quarter) {
                return Err(RunError::Validation(fracns_core::Error::InvalidRadius(format!(
                    "window ({lo}, {hi}) must satisfy 0 < lo < hi <= L/4 = {quarter}"
                ))));
            }
            if self.analysis.kernel_grid < 32 || self.analysis.kernel_grid % 2 != 0 {
                return invalid(format!("kernel grid must be even and >= 32, got {}", self.analysis.kernel_grid));
            }
            let f = &self.analysis.floors;
            if !(f.deviation > 0.0 && f.lower_bound > 0.0) {
                return invalid("certificate floors must be positive".into());
            }
        }
        if self.experiment == Experiment::Evolve {
            let e = &self.evolve;
            if !(e.t_end > 0.0 && e.t_end.is_finite() && e.dt > 0.0 && e.dt <= e.t_end) {
                return Err(RunError::Validation(fracns_core::Error::InvalidTimeStep(format!(
                    "need 0 < dt <= t_end, got dt = {}, t_end = {}",
                    e.dt, e.t_end
                ))));
            }
            if !(e.perturbation >= 0.0 && e.perturbation.is_finite()) {
                return invalid(format!("perturbation must be >= 0, got {}", e.perturbation));
            }
        }
        Ok(())
    }
}
