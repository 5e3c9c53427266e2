use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pwclock_core::conditional::{self, rank_one_projector};
use pwclock_core::{timemap, Clock, ClockParams, SystemSpec};

fn narrow_clock() -> Clock {
    Clock::new(
        ClockParams {
            mass: 1e4,
            damping: 0.1,
            n_reset: 1.5,
            ..ClockParams::default()
        }
        .with_amplitude(1.0),
    )
    .unwrap()
}

fn time_map(c: &mut Criterion) {
    let clock = Clock::new(ClockParams::default()).unwrap();
    let x = clock.position_expectation(0.7);
    c.bench_function("n_from_x_exact", |b| {
        b.iter(|| timemap::n_from_x_exact(black_box(x), &clock).unwrap())
    });
    c.bench_function("linearization_report_2048", |b| {
        b.iter(|| timemap::linearization_report(&clock, black_box(2048)).unwrap())
    });
}

fn posterior(c: &mut Criterion) {
    let clock = narrow_clock();
    let x = clock.position_expectation(0.5);
    let mut group = c.benchmark_group("posterior_over_n");
    for grid in [512, 2048, 8192] {
        group.bench_with_input(BenchmarkId::from_parameter(grid), &grid, |b, &g| {
            b.iter(|| conditional::posterior_over_n(black_box(x), &clock, g).unwrap())
        });
    }
    group.finish();
}

fn history(c: &mut Criterion) {
    let clock = narrow_clock();
    let spec = SystemSpec::default_qubit();
    let mut group = c.benchmark_group("history_state");
    group.sample_size(10);
    for grid in [256, 1024] {
        group.bench_with_input(BenchmarkId::new("build", grid), &grid, |b, &g| {
            b.iter(|| conditional::build_history_state(&spec, &clock, g).unwrap())
        });
    }
    let hist = conditional::build_history_state(&spec, &clock, 2048).unwrap();
    let proj = rank_one_projector(spec.initial_state());
    let x = clock.position_expectation(0.5);
    group.bench_function("conditional_probability_2048", |b| {
        b.iter(|| conditional::conditional_system_probability(&hist, black_box(x), &proj).unwrap())
    });
    group.finish();
}

criterion_group!(benches, time_map, posterior, history);
criterion_main!(benches);
