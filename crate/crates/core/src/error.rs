use thiserror::Error;

/// Everything that can go wrong while validating inputs or running one of
/// the numerical procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("over-damped clock: r/2 = {half_damping} >= omega = {omega}")]
    OverDamped { half_damping: f64, omega: f64 },

    #[error("reset horizon {n_reset} exceeds 1/r = {limit}")]
    ResetTooLate { n_reset: f64, limit: f64 },

    #[error("oscillation amplitude must be positive, got {0}")]
    NonPositiveAmplitude(f64),

    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveScale { name: &'static str, value: f64 },

    #[error("damping must be non-negative and finite, got {0}")]
    NegativeDamping(f64),

    #[error("reset horizon must be positive and finite, got {0}")]
    InvalidResetHorizon(f64),

    #[error("hamiltonian is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("initial state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("system dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("abstract time {n} outside [0, {n_reset})")]
    InvalidAbstractTime { n: f64, n_reset: f64 },

    #[error("abstract time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("r = 1/n_reset = {damping} violates under-damping (omega = {omega})")]
    UnderDampingViolated { damping: f64, omega: f64 },

    #[error("negative radicand {0} in semiclassical position")]
    NegativeRadicand(f64),

    #[error("clock reading {x} outside attainable interval ({low}, {high}]")]
    OutOfRange { x: f64, low: f64, high: f64 },

    #[error("position map is not monotone on [0, n_reset]: Omega*n_reset = {phase} >= {limit}")]
    NonMonotonicWindow { phase: f64, limit: f64 },

    #[error("operation requires a damped clock (r > 0)")]
    ZeroDamping,

    #[error("clock reading {x} has degenerate support (weight {weight:e})")]
    DegenerateSupport { x: f64, weight: f64 },

    #[error("operator is not an orthogonal projector (deviation {0:e})")]
    NotAProjector(f64),

    #[error("Hermitian eigendecomposition failed to converge")]
    EigenFailure,

    #[error("grid needs at least {min} points, got {got}")]
    InvalidGrid { min: usize, got: usize },

    #[error("bracket [{a}, {b}] does not enclose a sign change")]
    NoBracket { a: f64, b: f64 },

    #[error("root finder did not converge in {0} iterations")]
    NoConvergence(usize),

    #[error("conditional probability has imaginary residue {0:e}")]
    ComplexProbability(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
