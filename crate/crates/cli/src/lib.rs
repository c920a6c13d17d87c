//! Experiment driver: a TOML configuration selects one experiment, which is run
//! once and leaves a JSON report plus CSV tables in the output directory.

mod config;
mod error;
mod output;
mod run;

pub use config::{
    AnalysisConfig, EmitConfig, EvolveConfig, Experiment, GridConfig, KernelConfig, Overrides, RunConfig,
    SolverSection, OUTPUT_DIR_ENV,
};
pub use error::RunError;
pub use output::{csv_text, emit_radial_csv, format_number, radial_csv, write_atomic};
pub use run::{run, RunReport, REPORT_FILE, SCHEMA_VERSION};
