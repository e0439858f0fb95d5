use thiserror::Error;

use crate::hamparse::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode amplitude vanishes (|u| = {u_abs:e}, |du| = {du_abs:e})")]
    ZeroAmplitude { u_abs: f64, du_abs: f64 },
    #[error(
        "overdamped Caldirola-Kanai model unsupported: omega0 = {omega0} <= gamma/2 = {half_gamma}"
    )]
    OverdampedUnsupported { omega0: f64, half_gamma: f64 },
    #[error("Wronskian drift {drift:e} at t = {t} exceeds alarm {alarm:e}")]
    WronskianDriftExceeded { t: f64, drift: f64, alarm: f64 },
    #[error("Wronskian condition violated: 2m Im(u conj(du)) = {value}, expected 1")]
    WronskianViolation { value: f64 },
    #[error("model evaluation failed: {0}")]
    ModelEvaluation(#[from] EvalError),
    #[error("mass must be positive, got m({t}) = {mass}")]
    NonPositiveMass { t: f64, mass: f64 },
    #[error("expression parse failed: {0}")]
    Parse(#[from] ParseError),
    #[error("step size control failed at t = {t}: {reason}")]
    StepControl { t: f64, reason: String },
    #[error("time mismatch: expected t = {expected}, got t = {found}")]
    TimeMismatch { expected: f64, found: f64 },
    #[error("density integrates to {integral}, expected 1")]
    UnnormalizedDensity { integral: f64 },
    #[error("log-integral domain error: a = {a} must exceed sqrt(b^2 + c^2) = {norm}")]
    DomainError { a: f64, norm: f64 },
    #[error("upper bound unavailable: omega(t)^2 = {omega_sq} at t = {t}")]
    FrequencyZero { t: f64, omega_sq: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
