//! Experiment configuration: one JSON document, complex numbers as
//! `[re, im]` pairs, every field optional.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pwclock_core::{ClockParams, Complex64, DMatrix, DVector, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ClockProfile,
    DampingOpt,
    Timemap,
    Posterior,
    IdealLimit,
    EvolveCompare,
    OracleCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::ClockProfile,
        Experiment::DampingOpt,
        Experiment::Timemap,
        Experiment::Posterior,
        Experiment::IdealLimit,
        Experiment::EvolveCompare,
        Experiment::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ClockProfile => "clock-profile",
            Experiment::DampingOpt => "damping-opt",
            Experiment::Timemap => "timemap",
            Experiment::Posterior => "posterior",
            Experiment::IdealLimit => "ideal-limit",
            Experiment::EvolveCompare => "evolve-compare",
            Experiment::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::UnknownExperiment(s.to_string()))
    }
}

/// System S as written in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub dim: usize,
    /// Row-major `dim × dim` matrix of `[re, im]` pairs.
    pub hamiltonian: Vec<[f64; 2]>,
    pub initial_state: Vec<[f64; 2]>,
}

impl Default for SystemConfig {
    /// The default qubit: H = diag(1/2, −1/2), Ψ_in = (1, 1)/√2.
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SystemConfig {
            dim: 2,
            hamiltonian: vec![[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.5, 0.0]],
            initial_state: vec![[s, 0.0], [s, 0.0]],
        }
    }
}

impl SystemConfig {
    pub fn to_spec(&self) -> Result<SystemSpec, CliError> {
        let d = self.dim;
        if self.hamiltonian.len() != d * d {
            return Err(CliError::Config(format!(
                "hamiltonian has {} entries, expected {}",
                self.hamiltonian.len(),
                d * d
            )));
        }
        let h = DMatrix::from_row_iterator(d, d, self.hamiltonian.iter().map(|[re, im]| Complex64::new(*re, *im)));
        let psi = DVector::from_iterator(
            self.initial_state.len(),
            self.initial_state.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        Ok(SystemSpec::new(h, psi)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub clock: ClockParams,
    pub system: SystemConfig,
    /// Overridden by the command-line experiment.
    pub experiment: Option<Experiment>,
    pub grid_size: usize,
    pub output_path: PathBuf,
    pub seed: u64,
    /// Abstract time whose mean reading ⟨x⟩(n) conditions the posterior and
    /// ideal-limit experiments. Defaults to n_reset/4.
    pub reading_time: Option<f64>,
    /// Half-width of the ideal-limit window in abstract time.
    pub window: f64,
    /// mω values for the ideal-limit sequence; A is held fixed.
    pub mass_scales: Vec<f64>,
    /// Adds readings drawn from the clock density to evolve-compare.
    pub sample_readings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            clock: ClockParams::default(),
            system: SystemConfig::default(),
            experiment: None,
            grid_size: 2048,
            output_path: PathBuf::from("out"),
            seed: 0,
            reading_time: None,
            window: 0.05,
            mass_scales: vec![10.0, 1e2, 1e3, 1e4],
            sample_readings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_size < MIN_GRID {
            return Err(CliError::Config(format!(
                "grid_size must be at least {MIN_GRID}, got {}",
                self.grid_size
            )));
        }
        if self.window.is_nan() || self.window <= 0.0 {
            return Err(CliError::Config(format!(
                "window must be positive, got {}",
                self.window
            )));
        }
        self.clock.validate()?;
        self.system.to_spec()?;
        Ok(())
    }

    pub fn reading_time(&self) -> f64 {
        self.reading_time.unwrap_or(0.25 * self.clock.n_reset)
    }
}

/// Scalars that `--sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Damping; n_reset follows as 1/r.
    R,
    /// Reset horizon; damping follows as 1/n_reset.
    NReset,
    Mass,
    Omega,
    GridSize,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::R => "r",
            SweepParam::NReset => "n_reset",
            SweepParam::Mass => "mass",
            SweepParam::Omega => "omega",
            SweepParam::GridSize => "grid_size",
        }
    }

    /// Copy of `config` with this parameter set to `value`.
    pub fn apply(self, config: &ExperimentConfig, value: f64) -> Result<ExperimentConfig, CliError> {
        let mut c = config.clone();
        match self {
            SweepParam::R => {
                c.clock.damping = value;
                c.clock.n_reset = 1.0 / value;
            }
            SweepParam::NReset => {
                c.clock.n_reset = value;
                c.clock.damping = 1.0 / value;
            }
            SweepParam::Mass => c.clock.mass = value,
            SweepParam::Omega => c.clock.omega = value,
            SweepParam::GridSize => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(CliError::Config(format!("grid_size must be an integer, got {value}")));
                }
                c.grid_size = value as usize;
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r" | "damping" => Ok(SweepParam::R),
            "n_reset" => Ok(SweepParam::NReset),
            "mass" => Ok(SweepParam::Mass),
            "omega" => Ok(SweepParam::Omega),
            "grid_size" => Ok(SweepParam::GridSize),
            other => Err(CliError::Config(format!("parameter `{other}` is not sweepable"))),
        }
    }
}

/// `param=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("sweep `{s}` is not of the form param=v1,v2,...")))?;
        let param = name.trim().parse()?;
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("sweep value `{v}` is not a number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SweepSpec { param, values })
    }
}
