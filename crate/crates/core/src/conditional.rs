//! Conditional probabilities with the clock position as the condition.
//!
//! Two views of the same idea. The posterior over abstract time treats
//! |⟨x|α(n′)⟩|² as a likelihood for n′ given a reading x. The history state
//! Σ_k w_k |α(n_k)⟩|Ψ_S(n_k)⟩ is the entangled clock-system state that
//! encodes the dynamics of S; conditioning it on a clock reading should
//! reproduce ordinary Schrödinger evolution at n(x).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::params::{hermitian_deviation, AbstractTime, SystemSpec};
use crate::quadrature;
use crate::system::Propagator;
use crate::timemap;

/// Default number of quadrature points in abstract time.
pub const DEFAULT_GRID: usize = 2048;
/// Minimum grid for a history state.
pub const MIN_HISTORY_GRID: usize = 16;
/// Weights below this are treated as "the clock never reads x".
pub const SUPPORT_FLOOR: f64 = 1e-300;
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;
const NEGATIVE_CLAMP: f64 = 1e-12;

/// P(x | n) = |⟨x|α(n)⟩|², a density in x.
pub fn position_given_n(x: f64, n: f64, clock: &Clock) -> Result<f64> {
    AbstractTime::new(n, clock.params())?;
    Ok(clock.density(x, n))
}

/// Upper integration bound min(n_reset, 1/r).
pub fn integration_bound(clock: &Clock) -> f64 {
    clock.n_reset().min(clock.params().damping_horizon())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDensity {
    pub x: f64,
    pub upper: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    /// ∫ |⟨x|α(n′)⟩|² dn′ before normalization.
    pub norm_raw: f64,
}

impl PosteriorDensity {
    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn integral(&self) -> f64 {
        quadrature::trapezoid(&self.density, self.step())
    }

    /// Posterior mass within `|n′ − center| ≤ half_width`.
    pub fn mass_within(&self, center: f64, half_width: f64) -> f64 {
        quadrature::interpolant_integral(&self.grid, &self.density, center - half_width, center + half_width)
    }

    /// Grid point of largest density (first one on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (k, &d) in self.density.iter().enumerate() {
            if d > self.density[best] {
                best = k;
            }
        }
        self.grid[best]
    }
}

/// Normalized density over n′ in `[0, min(n_reset, 1/r)]` given a reading x.
pub fn posterior_over_n(x: f64, clock: &Clock, grid_size: usize) -> Result<PosteriorDensity> {
    posterior_over_n_within(x, clock, grid_size, integration_bound(clock))
}

/// [`posterior_over_n`] with an explicit upper bound on n′.
pub fn posterior_over_n_within(x: f64, clock: &Clock, grid_size: usize, upper: f64) -> Result<PosteriorDensity> {
    if grid_size < 2 {
        return Err(Error::InvalidGrid { min: 2, got: grid_size });
    }
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidResetHorizon(upper));
    }
    let grid = quadrature::closed_grid(0.0, upper, grid_size);
    let raw: Vec<f64> = grid.par_iter().map(|&n| clock.density(x, n)).collect();
    let h = grid[1] - grid[0];
    let norm_raw = quadrature::trapezoid(&raw, h);
    if !(norm_raw >= SUPPORT_FLOOR) {
        return Err(Error::DegenerateSupport { x, weight: norm_raw });
    }
    let density = raw.into_iter().map(|v| v / norm_raw).collect();
    Ok(PosteriorDensity {
        x,
        upper,
        grid,
        density,
        norm_raw,
    })
}

/// Posterior mass within `window` of n(x). Tends to 1 as the clock narrows.
pub fn ideal_limit_concentration(x: f64, clock: &Clock, window: f64, grid_size: usize) -> Result<f64> {
    let center = timemap::n_from_x_exact(x, clock)?;
    let posterior = posterior_over_n(x, clock, grid_size)?;
    Ok(posterior.mass_within(center, window))
}

/// Discretized history state N·Σ_k w_k |α(n_k)⟩ ⊗ exp(+iH_S n_k)|Ψ_in⟩.
#[derive(Debug, Clone)]
pub struct HistoryState {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub sys_states: Vec<DVector<Complex64>>,
    pub clock: Clock,
    /// Global factor N making the joint state unit-norm.
    pub norm: f64,
}

impl HistoryState {
    pub fn dim(&self) -> usize {
        self.sys_states[0].len()
    }

    /// Σ_{k,k′} w_k w_k′ ⟨α_k|α_k′⟩⟨s_k|s_k′⟩ with the closed-form clock
    /// overlaps. Rows are summed in parallel; the row totals in ascending k.
    pub fn gram_sum(&self) -> f64 {
        gram_sum(&self.grid, &self.weights, &self.sys_states, &self.clock)
    }

    /// ⟨Ψ|Ψ⟩ of the normalized state.
    pub fn joint_norm_squared(&self) -> f64 {
        self.norm * self.norm * self.gram_sum()
    }

    /// (⟨x| ⊗ 1)|Ψ⟩, the unnormalized system state conditioned on reading x.
    pub fn conditioned_state(&self, x: f64) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        for ((&n, &w), s) in self.grid.iter().zip(&self.weights).zip(&self.sys_states) {
            let amp = self.clock.wavefunction_unchecked(x, n) * (w * self.norm);
            v.axpy(amp, s, Complex64::new(1.0, 0.0));
        }
        v
    }
}

fn gram_sum(grid: &[f64], weights: &[f64], states: &[DVector<Complex64>], clock: &Clock) -> f64 {
    let means: Vec<f64> = grid.iter().map(|&n| clock.position_expectation(n)).collect();
    let widths: Vec<f64> = grid.iter().map(|&n| clock.width(n)).collect();
    let rows: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..grid.len() {
                let sum_sq = widths[k] * widths[k] + widths[j] * widths[j];
                let dm = means[k] - means[j];
                let overlap = (2.0 * widths[k] * widths[j] / sum_sq).sqrt() * (-dm * dm / (4.0 * sum_sq)).exp();
                if overlap == 0.0 {
                    continue;
                }
                row += states[k].dotc(&states[j]) * (weights[j] * overlap);
            }
            row * weights[k]
        })
        .collect();
    rows.iter().sum::<Complex64>().re
}

/// Builds the history state on a closed trapezoid grid over `[0, n_reset]`.
pub fn build_history_state(spec: &SystemSpec, clock: &Clock, grid_size: usize) -> Result<HistoryState> {
    if grid_size < MIN_HISTORY_GRID {
        return Err(Error::InvalidGrid {
            min: MIN_HISTORY_GRID,
            got: grid_size,
        });
    }
    let propagator = Propagator::new(spec.hamiltonian())?;
    let grid = quadrature::closed_grid(0.0, clock.n_reset(), grid_size);
    let weights = quadrature::trapezoid_weights(grid_size, grid[1] - grid[0]);
    let psi = spec.initial_state();
    let sys_states: Vec<_> = grid.par_iter().map(|&n| propagator.apply(n, psi)).collect();
    let gram = gram_sum(&grid, &weights, &sys_states, clock);
    Ok(HistoryState {
        grid,
        weights,
        sys_states,
        clock: *clock,
        norm: 1.0 / gram.sqrt(),
    })
}

/// Checks that `p` is Hermitian and idempotent; returns the worst deviation.
pub fn projector_deviation(p: &DMatrix<Complex64>) -> f64 {
    let herm = hermitian_deviation(p);
    if !herm.is_finite() {
        return herm;
    }
    let square = p * p;
    let idem = (square - p).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    herm.max(idem)
}

/// P(Π | x) = ⟨v|Π|v⟩ / ⟨v|v⟩ with v the history state conditioned on x.
///
/// This equals the double sum over (k, k′) of w_k w_k′ Ψ_C(x,n_k)
/// conj(Ψ_C(x,n_k′)) ⟨s_k′|Π|s_k⟩, divided by the same with Π = 1.
pub fn conditional_system_probability(history: &HistoryState, x: f64, projector: &DMatrix<Complex64>) -> Result<f64> {
    let d = history.dim();
    if projector.nrows() != d || projector.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: projector.nrows(),
        });
    }
    let deviation = projector_deviation(projector);
    if !(deviation <= PROJECTOR_TOLERANCE) {
        return Err(Error::NotAProjector(deviation));
    }
    let v = history.conditioned_state(x);
    let denominator = v.norm_squared();
    if !(denominator >= SUPPORT_FLOOR) {
        return Err(Error::DegenerateSupport { x, weight: denominator });
    }
    let numerator = v.dotc(&(projector * &v));
    let residue = numerator.im.abs() / denominator;
    if residue > IMAGINARY_TOLERANCE {
        return Err(Error::ComplexProbability(residue));
    }
    let p = numerator.re / denominator;
    if p < -NEGATIVE_CLAMP {
        return Err(Error::ComplexProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// |φ⟩⟨φ| for a (not necessarily normalized) vector φ.
pub fn rank_one_projector(phi: &DVector<Complex64>) -> DMatrix<Complex64> {
    let unit = phi / Complex64::new(phi.norm(), 0.0);
    &unit * unit.adjoint()
}
