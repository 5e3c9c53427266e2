//! Closed-form model of the damped-oscillator coherent-state clock.
//!
//! The clock density |Ψ_C(x, n)|² is a Gaussian centred on
//! ⟨x⟩(n) = A·e^{−rn/2}·cos(Ωn) whose standard deviation is the width
//! δ(n) = e^{−rn/2}·√(ħ/(2mω)). The wavefunction itself is real up to the
//! global phase φ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{AbstractTime, ClockParams};
use crate::roots;

/// Central-difference step for first derivatives.
pub const FIRST_DIFFERENCE_STEP: f64 = 1e-5;
/// Step for the second difference used to classify stationary points.
pub const SECOND_DIFFERENCE_STEP: f64 = 1e-3;

/// A validated clock with its derived constants cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clock {
    params: ClockParams,
    frequency: f64,
    amplitude: f64,
    base_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockMoments {
    pub n: f64,
    pub mean_x: f64,
    pub width: f64,
}

impl Clock {
    pub fn new(params: ClockParams) -> Result<Self> {
        let params = params.validate()?;
        Ok(Clock {
            params,
            frequency: params.damped_frequency(),
            amplitude: params.amplitude(),
            base_width: params.base_width(),
        })
    }

    pub fn params(&self) -> &ClockParams {
        &self.params
    }

    /// Ω = √(ω² − r²/4).
    pub fn damped_frequency(&self) -> f64 {
        self.frequency
    }

    /// A = √(2ħ/(mω))·Re(α).
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn damping(&self) -> f64 {
        self.params.damping
    }

    pub fn n_reset(&self) -> f64 {
        self.params.n_reset
    }

    /// ⟨x⟩(n) = A·e^{−rn/2}·cos(Ωn). Defined for any real n.
    pub fn position_expectation(&self, n: f64) -> f64 {
        self.amplitude * (-0.5 * self.params.damping * n).exp() * (self.frequency * n).cos()
    }

    /// d⟨x⟩/dn.
    pub fn position_velocity(&self, n: f64) -> f64 {
        let r = self.params.damping;
        let phase = self.frequency * n;
        -self.amplitude * (-0.5 * r * n).exp() * (0.5 * r * phase.cos() + self.frequency * phase.sin())
    }

    /// δ(n) = e^{−rn/2}·√(ħ/(2mω)), the standard deviation of |Ψ_C(·, n)|².
    pub fn width(&self, n: f64) -> f64 {
        (-0.5 * self.params.damping * n).exp() * self.base_width
    }

    /// ∂δ/∂r at fixed n.
    pub fn width_damping_derivative(&self, n: f64) -> f64 {
        -0.5 * n * self.width(n)
    }

    /// σ(n) = rħe^{−rn}/(mω).
    pub fn decoherence_rate(&self, n: f64) -> f64 {
        let p = &self.params;
        decoherence_rate_at(p.damping, n, p.hbar, p.mass, p.omega)
    }

    pub fn moments(&self, n: AbstractTime) -> ClockMoments {
        let n = n.value();
        ClockMoments {
            n,
            mean_x: self.position_expectation(n),
            width: self.width(n),
        }
    }

    /// Ψ_C(x, n) for n in `[0, n_reset)`.
    pub fn wavefunction(&self, x: f64, n: f64) -> Result<Complex64> {
        AbstractTime::new(n, &self.params)?;
        Ok(self.wavefunction_unchecked(x, n))
    }

    /// Ψ_C(x, n) without the reset-horizon check; quadrature grids include
    /// the closing endpoint.
    pub fn wavefunction_unchecked(&self, x: f64, n: f64) -> Complex64 {
        let width = self.width(n);
        let norm = (2.0 * PI * width * width).powf(-0.25);
        let dx = x - self.position_expectation(n);
        let magnitude = norm * (-dx * dx / (4.0 * width * width)).exp();
        Complex64::from_polar(magnitude, self.params.phase)
    }

    /// |Ψ_C(x, n)|², not range-checked.
    pub fn density(&self, x: f64, n: f64) -> f64 {
        let width = self.width(n);
        let z = (x - self.position_expectation(n)) / width;
        (-0.5 * z * z).exp() / (width * (2.0 * PI).sqrt())
    }

    /// ⟨α(n₁)|α(n₂)⟩ for two real Gaussians of this family.
    pub fn overlap(&self, n1: f64, n2: f64) -> f64 {
        let (w1, w2) = (self.width(n1), self.width(n2));
        let sum_sq = w1 * w1 + w2 * w2;
        let dm = self.position_expectation(n1) - self.position_expectation(n2);
        (2.0 * w1 * w2 / sum_sq).sqrt() * (-dm * dm / (4.0 * sum_sq)).exp()
    }
}

/// δ = e^{−rn/2}·√(ħ/(2mω)) as a function of the damping.
pub fn width_at(damping: f64, n: f64, hbar: f64, mass: f64, omega: f64) -> f64 {
    (-0.5 * damping * n).exp() * (hbar / (2.0 * mass * omega)).sqrt()
}

/// σ = rħe^{−rn}/(mω) as a function of the damping, for damping sweeps.
pub fn decoherence_rate_at(damping: f64, n: f64, hbar: f64, mass: f64, omega: f64) -> f64 {
    damping * hbar * (-damping * n).exp() / (mass * omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StationaryKind {
    LocalMaximum,
    LocalMinimum,
    Inflection,
}

/// The stationary point of σ along r at fixed n, with its classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub n: f64,
    pub damping: f64,
    pub second_difference: f64,
    pub kind: StationaryKind,
}

/// r* = 1/n, where ∂σ/∂r = (ħ/mω)·e^{−rn}·(1 − rn) vanishes.
///
/// The classification comes from a central second difference of σ in r.
/// It is a local maximum: σ(r) = r·e^{−rn} rises then falls.
pub fn damping_stationary_point(n: f64, params: &ClockParams) -> Result<StationaryPoint> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::NonPositiveTime(n));
    }
    let damping = 1.0 / n;
    let second_difference = decoherence_second_difference(damping, n, params);
    Ok(StationaryPoint {
        n,
        damping,
        second_difference,
        kind: classify(second_difference),
    })
}

/// Locates the extremum of σ along r at fixed n numerically, as the root of
/// the central finite-difference derivative on `[r_low, r_high]`.
pub fn locate_decoherence_extremum(n: f64, params: &ClockParams, r_low: f64, r_high: f64) -> Result<StationaryPoint> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::NonPositiveTime(n));
    }
    let derivative = |r: f64| decoherence_damping_derivative(r, n, params);
    let damping = roots::bisect_secant(derivative, r_low, r_high, roots::ROOT_TOLERANCE, roots::MAX_ITERATIONS)?;
    let second_difference = decoherence_second_difference(damping, n, params);
    Ok(StationaryPoint {
        n,
        damping,
        second_difference,
        kind: classify(second_difference),
    })
}

/// Central finite difference of σ with respect to r, step
/// [`FIRST_DIFFERENCE_STEP`].
pub fn decoherence_damping_derivative(damping: f64, n: f64, params: &ClockParams) -> f64 {
    let h = FIRST_DIFFERENCE_STEP;
    let sigma = |r| decoherence_rate_at(r, n, params.hbar, params.mass, params.omega);
    (sigma(damping + h) - sigma(damping - h)) / (2.0 * h)
}

fn decoherence_second_difference(damping: f64, n: f64, params: &ClockParams) -> f64 {
    let h = SECOND_DIFFERENCE_STEP;
    let sigma = |r| decoherence_rate_at(r, n, params.hbar, params.mass, params.omega);
    (sigma(damping + h) - 2.0 * sigma(damping) + sigma(damping - h)) / (h * h)
}

fn classify(second_difference: f64) -> StationaryKind {
    if second_difference < 0.0 {
        StationaryKind::LocalMaximum
    } else if second_difference > 0.0 {
        StationaryKind::LocalMinimum
    } else {
        StationaryKind::Inflection
    }
}

/// r = 1/n_reset, the damping that saturates the running-time bound.
///
/// `n_reset = +∞` gives the undamped clock.
pub fn recommend_damping(n_reset: f64, params: &ClockParams) -> Result<f64> {
    if !(n_reset > 0.0) {
        return Err(Error::InvalidResetHorizon(n_reset));
    }
    let damping = 1.0 / n_reset;
    if 0.5 * damping >= params.omega {
        return Err(Error::UnderDampingViolated {
            damping,
            omega: params.omega,
        });
    }
    Ok(damping)
}

/// x = e^{−rn/2}·√(2E/(m₀ω) + p²/ω²) with scalars in place of operators.
///
/// Natural units only; the two radicand terms carry different dimensions
/// otherwise. The stored mass plays the role of m₀.
pub fn semiclassical_position(energy: f64, momentum: f64, n: f64, params: &ClockParams) -> Result<f64> {
    let omega = params.omega;
    let radicand = 2.0 * energy / (params.mass * omega) + momentum * momentum / (omega * omega);
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok((-0.5 * params.damping * n).exp() * radicand.sqrt())
}
