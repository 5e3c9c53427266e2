//! Driver for the damped-oscillator clock experiments: config ingestion,
//! orchestration, sweeps and serialized outputs.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, SweepParam, SweepSpec};
pub use error::CliError;

use output::{Cell, Meta, Table};
use pwclock_core::Clock;

pub const THREADS_ENV: &str = "PWCLOCK_THREADS";

/// A single experiment or the full bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    All,
    One(Experiment),
}

impl Target {
    pub fn experiments(self) -> Vec<Experiment> {
        match self {
            Target::All => Experiment::ALL.to_vec(),
            Target::One(e) => vec![e],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::All => "all",
            Target::One(e) => e.name(),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(Target::All)
        } else {
            s.parse().map(Target::One)
        }
    }
}

/// Worker count from `PWCLOCK_THREADS`; `None` leaves rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Threads(v)),
        },
    }
}

/// Runs `f` on a pool of `threads` workers.
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs one experiment and writes `<stem>.csv` and `<stem>.meta.json`.
/// Returns the CSV path.
pub fn run_one(experiment: Experiment, config: &ExperimentConfig, dir: &Path, stem: &str) -> Result<PathBuf, CliError> {
    let start = Instant::now();
    config.validate()?;
    let mut resolved = config.clone();
    resolved.experiment = Some(experiment);
    resolved.output_path = dir.to_path_buf();
    let clock = Clock::new(config.clock)?;
    let derived = experiments::derived_constants(&clock, &config.system.to_spec()?)?;
    let outcome = experiments::run_experiment(experiment, config)?;

    output::ensure_dir(dir)?;
    let csv = output::csv_path(dir, stem);
    outcome.table.write_csv(&csv)?;
    let meta = Meta {
        schema_version: output::SCHEMA_VERSION,
        experiment: experiment.name(),
        library_version: env!("CARGO_PKG_VERSION"),
        config: &resolved,
        derived,
        columns: &outcome.table.header,
        rows: outcome.table.rows.len(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        details: outcome.details,
    };
    output::write_json(&output::meta_path(dir, stem), &meta)?;
    Ok(csv)
}

/// Runs every experiment of `target`, each under its own name.
pub fn run(target: Target, config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    target
        .experiments()
        .into_iter()
        .map(|e| run_one(e, config, dir, e.name()))
        .collect()
}

/// Runs `target` once per sweep value. Output stems are
/// `<experiment>__<param>-<index>`; the index file
/// `<target>__<param>.index.csv` is written after every run finished.
/// Failed values are recorded there and turn the overall result into
/// [`CliError::SweepFailed`].
pub fn sweep(
    target: Target,
    config: &ExperimentConfig,
    dir: &Path,
    spec: &SweepSpec,
) -> Result<Vec<PathBuf>, CliError> {
    let name = spec.param.name();
    if spec.values.is_empty() {
        return Err(CliError::NoValues(name.to_string()));
    }
    let mut index = Table::new(&["value", "experiment", "status", "path", "error"]);
    let mut written = Vec::new();
    let mut failed = 0;
    let mut total = 0;
    for (k, &value) in spec.values.iter().enumerate() {
        let swept = spec.param.apply(config, value);
        for experiment in target.experiments() {
            total += 1;
            let stem = format!("{}__{name}-{k}", experiment.name());
            let result = swept
                .as_ref()
                .map_err(clone_error)
                .and_then(|c| run_one(experiment, c, dir, &stem));
            let (status, path, error) = match result {
                Ok(path) => {
                    let file = path
                        .file_name()
                        .map(|f| f.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    written.push(path);
                    ("ok", file, String::new())
                }
                Err(e @ (CliError::Io { .. } | CliError::Write { .. })) => return Err(e),
                Err(e) => {
                    failed += 1;
                    ("failed", String::new(), e.to_json().to_string())
                }
            };
            index.push(vec![
                Cell::Float(value),
                experiment.name().into(),
                status.into(),
                Cell::Text(path),
                Cell::Text(error),
            ]);
        }
    }
    output::ensure_dir(dir)?;
    let index_path = dir.join(format!("{}__{name}.index.csv", target.name()));
    index.write_csv(&index_path)?;
    written.push(index_path);
    if failed > 0 {
        return Err(CliError::SweepFailed { failed, total });
    }
    Ok(written)
}

fn clone_error(e: &CliError) -> CliError {
    match e {
        CliError::Config(m) => CliError::Config(m.clone()),
        CliError::Model(m) => CliError::Model(m.clone()),
        other => CliError::Config(other.to_string()),
    }
}
