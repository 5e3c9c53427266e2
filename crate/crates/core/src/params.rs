//! Shared domain types: clock configuration, abstract time and the
//! finite-dimensional system that the clock keeps time for.
//!
//! Natural units (ħ = m = ω = 1) are the default, but every formula in the
//! crate carries ħ, m and ω explicitly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance for Hermiticity and normalization checks.
pub const SYSTEM_TOLERANCE: f64 = 1e-12;

/// Raw configuration of the damped-oscillator clock.
///
/// Plain data; call [`ClockParams::validate`] (or build a [`crate::Clock`])
/// before using it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClockParams {
    pub hbar: f64,
    pub mass: f64,
    /// Undamped angular frequency ω.
    pub omega: f64,
    /// Damping coefficient r, in inverse abstract time.
    pub damping: f64,
    /// Coherent-state parameter α. Only `Re(α)` reaches any observable.
    pub alpha: Complex64,
    pub n_reset: f64,
    /// Global phase φ. Never affects a probability.
    pub phase: f64,
}

impl Default for ClockParams {
    /// ħ = m = ω = 1, r = ω/2, n_reset = 1/r and α chosen so that A = 1.
    fn default() -> Self {
        ClockParams {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            damping: 0.5,
            alpha: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            n_reset: 2.0,
            phase: 0.0,
        }
    }
}

impl ClockParams {
    /// Ω = √(ω² − r²/4). NaN when over-damped.
    pub fn damped_frequency(&self) -> f64 {
        (self.omega * self.omega - 0.25 * self.damping * self.damping).sqrt()
    }

    /// A = √(2ħ/(mω))·Re(α), the undamped oscillation amplitude.
    pub fn amplitude(&self) -> f64 {
        (2.0 * self.hbar / (self.mass * self.omega)).sqrt() * self.alpha.re
    }

    /// Ground-state width √(ħ/(2mω)), i.e. the clock width at n = 0.
    pub fn base_width(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// Upper bound 1/r on the running time (+∞ for an undamped clock).
    pub fn damping_horizon(&self) -> f64 {
        if self.damping > 0.0 {
            1.0 / self.damping
        } else {
            f64::INFINITY
        }
    }

    /// Returns a copy whose `Re(α)` is re-solved so the amplitude equals `a`.
    /// `Im(α)` is kept.
    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.alpha.re = a * (self.mass * self.omega / (2.0 * self.hbar)).sqrt();
        self
    }

    pub fn validate(self) -> Result<Self> {
        for (name, value) in [("hbar", self.hbar), ("mass", self.mass), ("omega", self.omega)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveScale { name, value });
            }
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return Err(Error::NegativeDamping(self.damping));
        }
        if 0.5 * self.damping >= self.omega {
            return Err(Error::OverDamped {
                half_damping: 0.5 * self.damping,
                omega: self.omega,
            });
        }
        if !(self.n_reset > 0.0 && self.n_reset.is_finite()) {
            return Err(Error::InvalidResetHorizon(self.n_reset));
        }
        let limit = self.damping_horizon();
        if self.n_reset > limit {
            return Err(Error::ResetTooLate {
                n_reset: self.n_reset,
                limit,
            });
        }
        let a = self.amplitude();
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::NonPositiveAmplitude(a));
        }
        Ok(self)
    }
}

/// Abstract time n, checked against the reset horizon of a clock.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AbstractTime(f64);

impl AbstractTime {
    pub fn new(n: f64, params: &ClockParams) -> Result<Self> {
        if n >= 0.0 && n < params.n_reset {
            Ok(AbstractTime(n))
        } else {
            Err(Error::InvalidAbstractTime {
                n,
                n_reset: params.n_reset,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The "rest of the Universe": a Hermitian generator and an initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    hamiltonian: DMatrix<Complex64>,
    initial_state: DVector<Complex64>,
}

impl SystemSpec {
    pub fn new(hamiltonian: DMatrix<Complex64>, initial_state: DVector<Complex64>) -> Result<Self> {
        SystemSpec {
            hamiltonian,
            initial_state,
        }
        .validate()
    }

    /// Qubit with H = diag(+ω_S/2, −ω_S/2), ω_S = 1, and Ψ_in = (1, 1)/√2.
    pub fn default_qubit() -> Self {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        SystemSpec::new(h, psi).expect("default qubit is valid")
    }

    pub fn validate(self) -> Result<Self> {
        let d = self.hamiltonian.nrows();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if self.hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.hamiltonian.ncols(),
            });
        }
        if self.initial_state.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.initial_state.len(),
            });
        }
        let dev = hermitian_deviation(&self.hamiltonian);
        if !(dev <= SYSTEM_TOLERANCE) {
            return Err(Error::NotHermitian(dev));
        }
        let norm = self.initial_state.norm();
        if !((norm - 1.0).abs() <= SYSTEM_TOLERANCE) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.initial_state.len()
    }

    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.hamiltonian
    }

    pub fn initial_state(&self) -> &DVector<Complex64> {
        &self.initial_state
    }

    /// H̃_S = 2·H_S/(rA), the generator conjugate to the displacement y = A − x.
    pub fn clock_generator(&self, params: &ClockParams) -> Result<DMatrix<Complex64>> {
        if params.damping <= 0.0 {
            return Err(Error::ZeroDamping);
        }
        let scale = 2.0 / (params.damping * params.amplitude());
        Ok(self.hamiltonian.map(|z| z * scale))
    }
}

/// Largest entrywise |M_ij − conj(M_ji)|.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let (rows, cols) = m.shape();
    if rows != cols {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..rows {
        for j in i..cols {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn clock(mass: f64, omega: f64, damping: f64, n_reset: f64, alpha: f64) -> ClockParams {
        ClockParams {
            hbar: 1.0,
            mass,
            omega,
            damping,
            alpha: c(alpha),
            n_reset,
            phase: 0.0,
        }
    }

    #[test]
    fn accepts_underdamped_clock() {
        let p = clock(1.0, 1.0, 0.5, 2.0, 1.0);
        assert_eq!(p.validate(), Ok(p));
    }

    #[test]
    fn rejects_overdamped_clock() {
        let err = clock(1.0, 1.0, 2.5, 0.2, 1.0).validate().unwrap_err();
        assert!(matches!(err, Error::OverDamped { .. }));
    }

    #[test]
    fn rejects_late_reset() {
        let err = clock(1.0, 1.0, 0.1, 20.0, 1.0).validate().unwrap_err();
        assert_eq!(
            err,
            Error::ResetTooLate {
                n_reset: 20.0,
                limit: 10.0
            }
        );
    }

    #[test]
    fn rejects_bad_amplitude_and_scales() {
        assert!(matches!(
            clock(1.0, 1.0, 0.5, 2.0, 0.0).validate(),
            Err(Error::NonPositiveAmplitude(_))
        ));
        assert!(matches!(
            clock(1.0, 1.0, 0.5, 2.0, -1.0).validate(),
            Err(Error::NonPositiveAmplitude(_))
        ));
        assert!(matches!(
            clock(0.0, 1.0, 0.5, 2.0, 1.0).validate(),
            Err(Error::NonPositiveScale { name: "mass", .. })
        ));
        let mut p = clock(1.0, 1.0, 0.5, 2.0, 1.0);
        p.hbar = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::NonPositiveScale { name: "hbar", .. })
        ));
    }

    #[test]
    fn undamped_clock_needs_finite_reset() {
        assert!(clock(1.0, 1.0, 0.0, 5.0, 1.0).validate().is_ok());
        assert!(matches!(
            clock(1.0, 1.0, 0.0, f64::INFINITY, 1.0).validate(),
            Err(Error::InvalidResetHorizon(_))
        ));
    }

    #[test]
    fn derived_quantities() {
        let p = clock(2.0, 3.0, 1.0, 0.5, 1.5);
        assert_eq!(p.damped_frequency(), (9.0f64 - 0.25).sqrt());
        assert_eq!(p.amplitude(), (2.0f64 / 6.0).sqrt() * 1.5);
        let q = p.with_amplitude(0.7);
        assert!((q.amplitude() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn abstract_time_bounds() {
        let p = ClockParams::default();
        assert!(AbstractTime::new(0.0, &p).is_ok());
        assert!(AbstractTime::new(p.n_reset, &p).is_err());
        assert!(AbstractTime::new(-1e-9, &p).is_err());
    }

    #[test]
    fn system_spec_validation() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(-0.5)]));
        let up = DVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(SystemSpec::new(h.clone(), up.clone()).is_ok());

        let mut bad = h.clone();
        bad[(0, 1)] = Complex64::new(0.3, 0.1);
        bad[(1, 0)] = Complex64::new(0.3, 0.1);
        assert!(matches!(SystemSpec::new(bad, up.clone()), Err(Error::NotHermitian(_))));

        let unnormalized = DVector::from_vec(vec![c(1.0), c(1.0)]);
        assert!(matches!(
            SystemSpec::new(h, unnormalized),
            Err(Error::NotNormalized(n)) if (n - 2f64.sqrt()).abs() < 1e-15
        ));

        let tiny = DMatrix::from_element(1, 1, c(1.0));
        assert!(matches!(
            SystemSpec::new(tiny, DVector::from_element(1, c(1.0))),
            Err(Error::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let p = ClockParams::default();
        assert_eq!(p.validate().and_then(ClockParams::validate), p.validate());
        let s = SystemSpec::default_qubit();
        assert_eq!(s.clone().validate(), Ok(s));
    }

    #[test]
    fn clock_generator_rescales() {
        let s = SystemSpec::default_qubit();
        let p = ClockParams::default();
        let g = s.clock_generator(&p).unwrap();
        // r = 0.5, A = 1
        assert!((g[(0, 0)].re - 2.0).abs() < 1e-14);
        let undamped = ClockParams { damping: 0.0, ..p };
        assert_eq!(s.clock_generator(&undamped), Err(Error::ZeroDamping));
    }
}
