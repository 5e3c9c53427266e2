//! Posterior and history-state checks against independent oracles: dense
//! Gram matrices from x-quadrature, the explicit double sum and exact
//! Schrödinger evolution.

use pwclock_core::conditional::{self, rank_one_projector, HistoryState};
use pwclock_core::system;
use pwclock_core::{Clock, ClockParams, Complex64, DMatrix, DVector, SystemSpec};

fn narrow_clock(mass: f64) -> Clock {
    Clock::new(
        ClockParams {
            mass,
            damping: 0.1,
            n_reset: 1.5,
            ..ClockParams::default()
        }
        .with_amplitude(1.0),
    )
    .unwrap()
}

fn basis(d: usize, i: usize) -> DVector<Complex64> {
    DVector::from_fn(d, |k, _| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0))
}

fn plus_minus() -> [DVector<Complex64>; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]),
        DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]),
    ]
}

/// ⟨α(n₁)|α(n₂)⟩ by trapezoid quadrature over x.
fn quadrature_overlap(c: &Clock, n1: f64, n2: f64) -> f64 {
    let lo = c.position_expectation(n1).min(c.position_expectation(n2)) - 15.0 * c.width(0.0);
    let hi = c.position_expectation(n1).max(c.position_expectation(n2)) + 15.0 * c.width(0.0);
    let steps = 6000;
    let h = (hi - lo) / steps as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..=steps {
        let x = lo + k as f64 * h;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        total += c.wavefunction_unchecked(x, n1).conj() * c.wavefunction_unchecked(x, n2) * w;
    }
    (total * h).re
}

#[test]
fn joint_norm_from_dense_quadrature_gram() {
    let spec = SystemSpec::default_qubit();
    for clock in [Clock::new(ClockParams::default()).unwrap(), narrow_clock(50.0)] {
        for size in [16, 40, 64] {
            let hist = conditional::build_history_state(&spec, &clock, size).unwrap();
            let mut total = Complex64::new(0.0, 0.0);
            for k in 0..size {
                for j in 0..size {
                    let ov = quadrature_overlap(&clock, hist.grid[k], hist.grid[j]);
                    total += hist.sys_states[k].dotc(&hist.sys_states[j]) * (hist.weights[k] * hist.weights[j] * ov);
                }
            }
            let norm_sq = hist.norm * hist.norm * total.re;
            assert!((norm_sq - 1.0).abs() < 1e-9, "size {size}: {norm_sq}");
            for s in &hist.sys_states {
                assert!((s.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

/// The literal double sum over grid indices.
fn double_sum_probability(hist: &HistoryState, x: f64, proj: &DMatrix<Complex64>) -> f64 {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for k in 0..hist.grid.len() {
        for j in 0..hist.grid.len() {
            let amp = hist.clock.wavefunction_unchecked(x, hist.grid[k])
                * hist.clock.wavefunction_unchecked(x, hist.grid[j]).conj()
                * (hist.weights[k] * hist.weights[j]);
            num += amp * hist.sys_states[j].dotc(&(proj * &hist.sys_states[k]));
            den += amp * hist.sys_states[j].dotc(&hist.sys_states[k]);
        }
    }
    (num / den).re
}

#[test]
fn vector_form_equals_double_sum() {
    let spec = SystemSpec::default_qubit();
    let clock = narrow_clock(20.0);
    let hist = conditional::build_history_state(&spec, &clock, 64).unwrap();
    for n in [0.2, 0.7, 1.3] {
        let x = clock.position_expectation(n);
        for phi in plus_minus().iter().chain([basis(2, 0)].iter()) {
            let proj = rank_one_projector(phi);
            let fast = conditional::conditional_system_probability(&hist, x, &proj).unwrap();
            assert!((fast - double_sum_probability(&hist, x, &proj)).abs() < 1e-12);
        }
    }
}

#[test]
fn narrow_clock_reproduces_schrodinger_evolution() {
    let spec = SystemSpec::default_qubit();
    let clock = narrow_clock(1e4);
    let hist = conditional::build_history_state(&spec, &clock, 2048).unwrap();
    let identity = DMatrix::<Complex64>::identity(2, 2);
    for n in [0.3, 0.5, 0.9] {
        let x = clock.position_expectation(n);
        let n_x = pwclock_core::timemap::n_from_x_exact(x, &clock).unwrap();
        let exact = system::evolve_exact(&spec, n_x).unwrap();
        for phi in plus_minus().iter().chain([basis(2, 0), basis(2, 1)].iter()) {
            let proj = rank_one_projector(phi);
            let p = conditional::conditional_system_probability(&hist, x, &proj).unwrap();
            let expected = phi.dotc(&exact).norm_sqr();
            assert!((p - expected).abs() < 1e-3, "n {n}: {p} vs {expected}");
            let complement = conditional::conditional_system_probability(&hist, x, &(&identity - &proj)).unwrap();
            assert!((p + complement - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn conditional_description_is_dynamical() {
    let spec = SystemSpec::default_qubit();
    let clock = narrow_clock(1e4);
    let hist = conditional::build_history_state(&spec, &clock, 1024).unwrap();
    let proj = rank_one_projector(&plus_minus()[0]);
    let (x1, x2) = (clock.position_expectation(0.2), clock.position_expectation(1.0));
    let s1 = system::evolve_exact(&spec, 0.2).unwrap();
    let s2 = system::evolve_exact(&spec, 1.0).unwrap();
    assert!(system::fidelity(&s1, &s2) < 1.0 - 1e-3);
    let p1 = conditional::conditional_system_probability(&hist, x1, &proj).unwrap();
    let p2 = conditional::conditional_system_probability(&hist, x2, &proj).unwrap();
    assert!((p1 - p2).abs() > 0.1);
}

#[test]
fn grid_doubling_is_converged_for_narrow_clock() {
    let spec = SystemSpec::default_qubit();
    let clock = narrow_clock(1e4);
    let coarse = conditional::build_history_state(&spec, &clock, 2048).unwrap();
    let fine = conditional::build_history_state(&spec, &clock, 4096).unwrap();
    let proj = rank_one_projector(&plus_minus()[0]);
    for n in [0.3, 0.5, 0.9] {
        let x = clock.position_expectation(n);
        let a = conditional::conditional_system_probability(&coarse, x, &proj).unwrap();
        let b = conditional::conditional_system_probability(&fine, x, &proj).unwrap();
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn posterior_refinement_changes_norm_little() {
    // readings whose posterior is clipped by n′ = 0 converge only at O(h²),
    // so the narrow clock is probed away from the start
    let cases = [
        (Clock::new(ClockParams::default()).unwrap(), [0.1, 0.5, 1.2]),
        (narrow_clock(1e4), [0.3, 0.5, 1.2]),
    ];
    for (clock, times) in cases {
        for n in times {
            let x = clock.position_expectation(n);
            let a = conditional::posterior_over_n(x, &clock, 2048).unwrap();
            let b = conditional::posterior_over_n(x, &clock, 4096).unwrap();
            assert!(((a.norm_raw - b.norm_raw) / b.norm_raw).abs() <= 1e-6);
            assert!((a.integral() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn concentration_rises_as_clock_narrows() {
    let mut previous = 0.0;
    for mass in [10.0, 1e2, 1e3, 1e4] {
        let clock = narrow_clock(mass);
        let x = clock.position_expectation(0.5);
        let f = conditional::ideal_limit_concentration(x, &clock, 0.05, 2048).unwrap();
        assert!(f > previous);
        previous = f;
    }
    assert!(previous > 0.99);
    let clock = narrow_clock(10.0);
    let full = conditional::ideal_limit_concentration(clock.position_expectation(0.5), &clock, 10.0, 2048).unwrap();
    assert!((full - 1.0).abs() < 1e-12);
}
