use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracns::{run, Overrides, RunConfig, RunError};

/// Run one fractional Navier-Stokes experiment.
#[derive(Debug, Parser)]
#[command(name = "fracns", version)]
struct Cli {
    /// solve, decay, profile, nonexist, evolve, norms or kernel
    experiment: String,
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Points per axis
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn main_inner(cli: Cli) -> Result<(), RunError> {
    let overrides = Overrides {
        experiment: Some(cli.experiment.parse()?),
        alpha: cli.alpha,
        n: cli.n,
        amplitude: cli.amplitude,
        seed: cli.seed,
        output_dir: cli.output_dir,
    };
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let config = RunConfig::from_toml(&text, &overrides)?;
    let report = run(&config)?;
    for (k, v) in &report.metrics {
        println!("{k} = {v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracns: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
