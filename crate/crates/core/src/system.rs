//! Evolution of the system S in abstract time and in clock position.
//!
//! Sign convention: U_S(n) = exp(+i·H_S·n). The clock generator satisfies
//! H_C ≐ −H_S on physical states, so S picks up the opposite sign from
//! the usual Schrödinger propagator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::params::SystemSpec;
use crate::quadrature;

/// Spectral form of a Hermitian generator, reused for many evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(generator: &DMatrix<Complex64>) -> Result<Self> {
        let eig = generator
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or(Error::EigenFailure)?;
        if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::EigenFailure);
        }
        Ok(Propagator {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    /// exp(+i·H·t)·ψ.
    pub fn apply(&self, t: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut coeffs = self.eigenvectors.ad_mul(psi);
        for (c, &lambda) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, lambda * t);
        }
        &self.eigenvectors * coeffs
    }

    /// exp(+i·H·t) as a matrix.
    pub fn matrix(&self, t: f64) -> DMatrix<Complex64> {
        let phases = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, l * t)),
        );
        let scaled = DMatrix::from_fn(self.eigenvectors.nrows(), self.eigenvectors.ncols(), |i, j| {
            self.eigenvectors[(i, j)] * phases[j]
        });
        scaled * self.eigenvectors.adjoint()
    }

    /// Largest |eigenvalue|, the spectral norm of the generator.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// exp(+i·H_S·n)·Ψ_in.
pub fn evolve_exact(spec: &SystemSpec, n: f64) -> Result<DVector<Complex64>> {
    let propagator = Propagator::new(spec.hamiltonian())?;
    Ok(propagator.apply(n, spec.initial_state()))
}

/// Clock-time argument of the position-parameterized propagator: H̃_S·y equals
/// H_S times this value.
fn clock_time(x: f64, clock: &Clock) -> Result<f64> {
    let r = clock.damping();
    if r == 0.0 {
        return Err(Error::ZeroDamping);
    }
    let a = clock.amplitude();
    if !(x <= a) {
        return Err(Error::OutOfRange {
            x,
            low: f64::NEG_INFINITY,
            high: a,
        });
    }
    let y = a - x;
    Ok(2.0 / (r * a) * y)
}

/// exp(+i·H̃_S·y)·Ψ_in with H̃_S = 2H_S/(rA) and y = A − x.
pub fn evolve_via_clock(spec: &SystemSpec, x: f64, clock: &Clock) -> Result<DVector<Complex64>> {
    let t = clock_time(x, clock)?;
    let propagator = Propagator::new(spec.hamiltonian())?;
    Ok(propagator.apply(t, spec.initial_state()))
}

/// |⟨a|b⟩|² / (‖a‖²‖b‖²); identical states give exactly 1.
pub fn fidelity(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    a.dotc(b).norm_sqr() / (a.dotc(a).re * b.dotc(b).re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionComparison {
    pub n: f64,
    pub x: f64,
    pub y: f64,
    #[serde(skip)]
    pub state_exact: DVector<Complex64>,
    #[serde(skip)]
    pub state_clock: DVector<Complex64>,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<EvolutionComparison>,
    pub worst_fidelity: f64,
}

/// Exact versus clock-parameterized evolution at the readings x = ⟨x⟩(n) on
/// a uniform grid over `[0, n_reset)`.
pub fn compare_evolutions(spec: &SystemSpec, clock: &Clock, grid_size: usize) -> Result<ComparisonTable> {
    if grid_size < 1 {
        return Err(Error::InvalidGrid { min: 1, got: 0 });
    }
    let propagator = Propagator::new(spec.hamiltonian())?;
    let psi = spec.initial_state();
    let rows = quadrature::half_open_grid(0.0, clock.n_reset(), grid_size)
        .into_par_iter()
        .map(|n| {
            let x = clock.position_expectation(n);
            let state_exact = propagator.apply(n, psi);
            let state_clock = propagator.apply(clock_time(x, clock)?, psi);
            let fidelity = fidelity(&state_exact, &state_clock);
            Ok(EvolutionComparison {
                n,
                x,
                y: clock.amplitude() - x,
                state_exact,
                state_clock,
                fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_fidelity = rows.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    Ok(ComparisonTable { rows, worst_fidelity })
}

/// Outcome of the "x is only a number for S" check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarCheckReport {
    /// Two evaluations of the clock propagator returned identical bits.
    pub deterministic: bool,
    /// Re-representations of the same reading gave identical bits.
    pub representation_invariant: bool,
    /// Largest ‖[x·I, O_S]‖ over the probed system operators.
    pub max_commutator_norm: f64,
    pub passed: bool,
}

/// Checks that the clock reading enters S only as a c-number.
///
/// Probed operators: H_S, the projector onto Ψ_in and every matrix unit
/// E_ij of the system space.
pub fn scalar_parameter_check(spec: &SystemSpec, clock: &Clock, x: f64) -> Result<ScalarCheckReport> {
    let first = evolve_via_clock(spec, x, clock)?;
    let second = evolve_via_clock(spec, x, clock)?;
    let deterministic = bits_equal(&first, &second);

    let reparsed: f64 = format!("{x:e}").parse().expect("float formatting round-trips");
    let shifted = x + 0.0;
    let mut representation_invariant = true;
    for alt in [reparsed, shifted, -(-x)] {
        let state = evolve_via_clock(spec, alt, clock)?;
        representation_invariant &= bits_equal(&first, &state);
    }

    let d = spec.dim();
    let scalar = DMatrix::<Complex64>::identity(d, d) * Complex64::new(x, 0.0);
    let psi = spec.initial_state();
    let mut operators = vec![spec.hamiltonian().clone(), psi * psi.adjoint()];
    for i in 0..d {
        for j in 0..d {
            let mut unit = DMatrix::zeros(d, d);
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            operators.push(unit);
        }
    }
    let max_commutator_norm = operators
        .iter()
        .map(|op| (&scalar * op - op * &scalar).norm())
        .fold(0.0, f64::max);

    Ok(ScalarCheckReport {
        deterministic,
        representation_invariant,
        max_commutator_norm,
        passed: deterministic && representation_invariant && max_commutator_norm == 0.0,
    })
}

fn bits_equal(a: &DVector<Complex64>, b: &DVector<Complex64>) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits())
}
