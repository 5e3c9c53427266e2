//! Time from a damped-oscillator clock in a globally stationary universe.
//!
//! A coherent state of a damped harmonic oscillator serves as the clock C
//! and a finite-dimensional system S is the rest of the universe. The
//! modules build up from the clock model to the conditional-probability
//! machinery:
//!
//! * [`params`]: validated configuration of the clock and of S;
//! * [`clock`]: wavefunction, moments, decoherence rate and damping choice;
//! * [`timemap`]: abstract time recovered from a position reading;
//! * [`system`]: exact versus clock-parameterized evolution of S;
//! * [`conditional`]: posteriors over abstract time and the history-state
//!   oracle for probabilities conditioned on a clock reading.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clock;
pub mod conditional;
pub mod error;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod scaling;
pub mod system;
pub mod timemap;

pub use clock::{Clock, ClockMoments, StationaryKind, StationaryPoint};
pub use conditional::{HistoryState, PosteriorDensity};
pub use error::{Error, Result};
pub use params::{AbstractTime, ClockParams, SystemSpec};
pub use system::{ComparisonTable, EvolutionComparison, Propagator, ScalarCheckReport};
pub use timemap::{LinearizationReport, TimeMapResult};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
