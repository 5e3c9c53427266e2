use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pwclock_cli::{CliError, ExperimentConfig, SweepSpec, Target};

/// Damped-oscillator clock experiments.
#[derive(Debug, Parser)]
#[command(name = "pwclock", version)]
struct Args {
    /// clock-profile, damping-opt, timemap, posterior, ideal-limit,
    /// evolve-compare, oracle-check or all.
    #[arg(default_value = "all")]
    experiment: String,

    /// JSON config; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Grid size, overriding `grid_size` from the config.
    #[arg(long)]
    grid: Option<usize>,

    /// `param=v1,v2,...` over r, n_reset, mass, omega or grid_size.
    #[arg(long)]
    sweep: Option<String>,
}

fn execute(args: Args) -> Result<Vec<PathBuf>, CliError> {
    let target: Target = args.experiment.parse()?;
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(grid) = args.grid {
        config.grid_size = grid;
    }
    if let Some(out) = args.out {
        config.output_path = out;
    }
    let sweep = args.sweep.as_deref().map(str::parse::<SweepSpec>).transpose()?;
    let threads = pwclock_cli::threads_from_env()?;
    let dir = config.output_path.clone();
    pwclock_cli::with_pool(threads, || match &sweep {
        Some(spec) => pwclock_cli::sweep(target, &config, &dir, spec),
        None => {
            config.validate()?;
            pwclock_cli::run(target, &config, &dir)
        }
    })?
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match execute(args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
