//! One table per experiment, plus scalar details for the sidecar.

use pwclock_core::clock::{self, width_at};
use pwclock_core::conditional::{self, rank_one_projector};
use pwclock_core::quadrature::{closed_grid, half_open_grid};
use pwclock_core::system::{self, Propagator};
use pwclock_core::timemap;
use pwclock_core::{Clock, ClockParams, Complex64, DVector, SystemSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Cell, DerivedConstants, Table};

/// Probe times in the oracle check, spread over the interior of `[0, n_reset)`.
pub const ORACLE_PROBES: usize = 8;

pub struct Outcome {
    pub table: Table,
    pub details: serde_json::Value,
}

pub fn derived_constants(clock: &Clock, spec: &SystemSpec) -> Result<DerivedConstants, CliError> {
    let clock_generator_norm = if clock.damping() > 0.0 {
        let generator = spec.clock_generator(clock.params())?;
        Some(Propagator::new(&generator)?.spectral_norm())
    } else {
        None
    };
    Ok(DerivedConstants {
        damped_frequency: clock.damped_frequency(),
        amplitude: clock.amplitude(),
        clock_generator_norm,
    })
}

pub fn run_experiment(experiment: Experiment, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let clock = Clock::new(config.clock)?;
    let spec = config.system.to_spec()?;
    match experiment {
        Experiment::ClockProfile => clock_profile(&clock, config),
        Experiment::DampingOpt => damping_opt(&clock, config),
        Experiment::Timemap => time_map(&clock, config),
        Experiment::Posterior => posterior(&clock, config),
        Experiment::IdealLimit => ideal_limit(&clock, config),
        Experiment::EvolveCompare => evolve_compare(&clock, &spec, config),
        Experiment::OracleCheck => oracle_check(&clock, &spec, config),
    }
}

fn clock_profile(clock: &Clock, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(&["n", "mean_x", "width", "decoherence_rate"]);
    let rows: Vec<_> = half_open_grid(0.0, clock.n_reset(), config.grid_size)
        .into_par_iter()
        .map(|n| {
            vec![
                n.into(),
                clock.position_expectation(n).into(),
                clock.width(n).into(),
                clock.decoherence_rate(n).into(),
            ]
        })
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table,
        details: json!({ "base_width": clock.params().base_width() }),
    })
}

/// σ and δ along r at n = n_reset, up to twice the stationary damping or
/// just short of critical damping, whichever is smaller.
fn damping_opt(clock: &Clock, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = *clock.params();
    let n = clock.n_reset();
    let stationary = clock::damping_stationary_point(n, &p)?;
    let r_max = (2.0 * stationary.damping).min(2.0 * p.omega * (1.0 - 1e-9));
    let located = clock::locate_decoherence_extremum(n, &p, 0.5 * stationary.damping, r_max)?;
    let recommended = clock::recommend_damping(n, &p)?;

    let mut table = Table::new(&["r", "decoherence_rate", "decoherence_rate_dr", "width", "width_dr"]);
    let rows: Vec<_> = closed_grid(0.0, r_max, config.grid_size)
        .into_par_iter()
        .map(|r| {
            let width = width_at(r, n, p.hbar, p.mass, p.omega);
            vec![
                r.into(),
                clock::decoherence_rate_at(r, n, p.hbar, p.mass, p.omega).into(),
                clock::decoherence_damping_derivative(r, n, &p).into(),
                width.into(),
                (-0.5 * n * width).into(),
            ]
        })
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table,
        details: json!({
            "n": n,
            "stationary_point": stationary,
            "located_extremum": located,
            "located_rn_minus_one": located.damping * n - 1.0,
            "recommended_damping": recommended,
        }),
    })
}

fn time_map(clock: &Clock, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let report = timemap::linearization_report(clock, config.grid_size)?;
    let mut table = Table::new(&["n", "x", "y", "n_exact", "n_log", "n_linear", "rel_error_linear"]);
    let grid = half_open_grid(0.0, clock.n_reset(), config.grid_size);
    for (n, row) in grid.into_iter().zip(&report.rows) {
        table.push(vec![
            n.into(),
            row.x.into(),
            row.y.into(),
            row.n_exact.into(),
            row.n_log.into(),
            row.n_linear.into(),
            row.rel_error_linear.into(),
        ]);
    }
    Ok(Outcome {
        table,
        details: json!({
            "monotone_window_limit": timemap::monotone_window_limit(clock),
            "linear_error_coefficient": timemap::linear_error_coefficient(clock),
            "checkpoint_rn_0.1": report.checkpoint(0.1),
        }),
    })
}

fn reading(clock: &Clock, config: &ExperimentConfig) -> Result<(f64, f64), CliError> {
    let n = pwclock_core::AbstractTime::new(config.reading_time(), clock.params())?.value();
    Ok((n, clock.position_expectation(n)))
}

fn posterior(clock: &Clock, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (n, x) = reading(clock, config)?;
    let post = conditional::posterior_over_n(x, clock, config.grid_size)?;
    let mut table = Table::new(&["n", "density"]);
    for (g, d) in post.grid.iter().zip(&post.density) {
        table.push(vec![(*g).into(), (*d).into()]);
    }
    Ok(Outcome {
        details: json!({
            "reading_time": n,
            "x": x,
            "n_exact": timemap::n_from_x_exact(x, clock)?,
            "upper": post.upper,
            "norm_raw": post.norm_raw,
            "integral": post.integral(),
            "mode": post.mode(),
        }),
        table,
    })
}

/// Clocks of growing mω at fixed ω and A, read at the same ⟨x⟩.
fn ideal_limit(clock: &Clock, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (n, x) = reading(clock, config)?;
    let base = *clock.params();
    let rows = config
        .mass_scales
        .par_iter()
        .map(|&mass_omega| {
            let c = Clock::new(
                ClockParams {
                    mass: mass_omega / base.omega,
                    ..base
                }
                .with_amplitude(clock.amplitude()),
            )?;
            let post = conditional::posterior_over_n(x, &c, config.grid_size)?;
            let center = timemap::n_from_x_exact(x, &c)?;
            Ok(vec![
                mass_omega.into(),
                c.width(n).into(),
                post.mass_within(center, config.window).into(),
                post.integral().into(),
            ])
        })
        .collect::<Result<Vec<Vec<Cell>>, CliError>>()?;
    let fractions: Vec<f64> = rows
        .iter()
        .map(|r| match r[2] {
            Cell::Float(v) => v,
            _ => unreachable!(),
        })
        .collect();
    let mut table = Table::new(&["mass_omega", "width", "fraction", "posterior_integral"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table,
        details: json!({
            "reading_time": n,
            "x": x,
            "window": config.window,
            "monotone": fractions.windows(2).all(|w| w[1] > w[0]),
        }),
    })
}

fn evolve_compare(clock: &Clock, spec: &SystemSpec, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let cmp = system::compare_evolutions(spec, clock, config.grid_size)?;
    let mut header = vec!["n", "x", "y", "fidelity"];
    let sampled = if config.sample_readings {
        header.extend(["x_sampled", "fidelity_sampled"]);
        // drawn in row order so the stream does not depend on the worker count
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let draws = cmp
            .rows
            .iter()
            .map(|row| {
                let normal = Normal::new(row.x, clock.width(row.n)).expect("width is positive and finite");
                normal.sample(&mut rng)
            })
            .collect::<Vec<f64>>();
        let fids = cmp
            .rows
            .par_iter()
            .zip(&draws)
            .map(|(row, &xs)| {
                system::evolve_via_clock(spec, xs, clock)
                    .ok()
                    .map(|state| system::fidelity(&row.state_exact, &state))
            })
            .collect::<Vec<Option<f64>>>();
        Some((draws, fids))
    } else {
        None
    };
    let mut table = Table::new(&header);
    for (k, row) in cmp.rows.iter().enumerate() {
        let mut cells: Vec<Cell> = vec![row.n.into(), row.x.into(), row.y.into(), row.fidelity.into()];
        if let Some((draws, fids)) = &sampled {
            cells.push(draws[k].into());
            cells.push(fids[k].into());
        }
        table.push(cells);
    }
    Ok(Outcome {
        table,
        details: json!({
            "worst_fidelity": cmp.worst_fidelity,
            "sampled_readings": config.sample_readings,
            "seed": config.seed,
        }),
    })
}

/// Computational basis and the discrete Fourier basis of the system space.
pub fn oracle_bases(d: usize) -> Vec<(&'static str, Vec<DVector<Complex64>>)> {
    let computational = (0..d)
        .map(|i| DVector::from_fn(d, |k, _| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    let scale = 1.0 / (d as f64).sqrt();
    let fourier = (0..d)
        .map(|i| {
            DVector::from_fn(d, |k, _| {
                let angle = std::f64::consts::TAU * (i * k) as f64 / d as f64;
                Complex64::from_polar(scale, angle)
            })
        })
        .collect();
    vec![("computational", computational), ("fourier", fourier)]
}

fn oracle_check(clock: &Clock, spec: &SystemSpec, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    timemap::check_monotone_window(clock)?;
    let history = conditional::build_history_state(spec, clock, config.grid_size)?;
    let bases = oracle_bases(spec.dim());
    let probes: Vec<f64> = (1..=ORACLE_PROBES)
        .map(|k| clock.n_reset() * k as f64 / (ORACLE_PROBES + 1) as f64)
        .collect();
    let rows = probes
        .par_iter()
        .map(|&n| {
            let x = clock.position_expectation(n);
            let n_x = timemap::n_from_x_exact(x, clock)?;
            let exact = system::evolve_exact(spec, n_x)?;
            let mut out = Vec::new();
            for (name, basis) in &bases {
                for (a, phi) in basis.iter().enumerate() {
                    let p = conditional::conditional_system_probability(&history, x, &rank_one_projector(phi))?;
                    let q = phi.dotc(&exact).norm_sqr();
                    out.push(vec![
                        n.into(),
                        x.into(),
                        n_x.into(),
                        (*name).into(),
                        a.into(),
                        p.into(),
                        q.into(),
                        (p - q).abs().into(),
                    ]);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(&["n", "x", "n_x", "basis", "index", "p_history", "p_exact", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for row in rows.into_iter().flatten() {
        if let Cell::Float(v) = row[7] {
            worst = worst.max(v);
        }
        table.push(row);
    }
    Ok(Outcome {
        table,
        details: json!({
            "max_abs_diff": worst,
            "joint_norm_squared": history.joint_norm_squared(),
            "width_at_origin": clock.width(0.0),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn float(c: &Cell) -> f64 {
        match c {
            Cell::Float(v) => *v,
            other => panic!("not a float: {other:?}"),
        }
    }

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            grid_size: 32,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn every_experiment_runs_on_defaults() {
        for e in Experiment::ALL {
            let out = run_experiment(e, &small()).unwrap();
            assert!(!out.table.rows.is_empty(), "{e}");
            for row in &out.table.rows {
                assert_eq!(row.len(), out.table.header.len());
            }
        }
    }

    #[test]
    fn clock_profile_schema() {
        let out = run_experiment(Experiment::ClockProfile, &small()).unwrap();
        assert_eq!(out.table.header, ["n", "mean_x", "width", "decoherence_rate"]);
        assert_eq!(out.table.rows.len(), 32);
        assert_eq!(float(&out.table.rows[0][0]), 0.0);
    }

    #[test]
    fn damping_opt_reports_stationary_point() {
        let out = run_experiment(Experiment::DampingOpt, &small()).unwrap();
        let rn = out.details["located_rn_minus_one"].as_f64().unwrap();
        assert!(rn.abs() <= 1e-6);
        assert_eq!(out.details["stationary_point"]["kind"], "local-maximum");
    }

    #[test]
    fn fourier_basis_is_orthonormal() {
        for d in [2, 3, 5] {
            let (_, basis) = &oracle_bases(d)[1];
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((a.dotc(b) - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampled_readings_follow_seed() {
        let cfg = ExperimentConfig {
            sample_readings: true,
            seed: 42,
            ..small()
        };
        let a = run_experiment(Experiment::EvolveCompare, &cfg).unwrap();
        let b = run_experiment(Experiment::EvolveCompare, &cfg).unwrap();
        assert_eq!(a.table, b.table);
        assert_eq!(a.table.header.len(), 6);
        let c = run_experiment(Experiment::EvolveCompare, &ExperimentConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn bad_reading_time_is_rejected() {
        let cfg = ExperimentConfig {
            reading_time: Some(5.0),
            ..small()
        };
        assert!(matches!(
            run_experiment(Experiment::Posterior, &cfg),
            Err(CliError::Model(pwclock_core::Error::InvalidAbstractTime { .. }))
        ));
    }
}
