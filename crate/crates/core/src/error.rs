use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown profile primitive `{0}`")]
    UnknownPrimitive(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("sampling grid is empty")]
    EmptyGrid,

    #[error("shift {0} outside (0, 1] in absolute value")]
    InvalidShift(f64),

    #[error("quadrature did not converge: value {value}, error estimate {error} after {evaluations} evaluations")]
    NotConverged { value: f64, error: f64, evaluations: usize },

    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },

    #[error("interface index {index} outside +-1..+-{layers}")]
    InvalidIndex { index: i32, layers: usize },

    #[error("configuration rejected: {0}")]
    ConfigGate(String),

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("point within {distance} of interface {index} (guard {guard})")]
    InterfaceProximity { index: i32, distance: f64, guard: f64 },

    #[error("denominator vanishes at s = {s}")]
    DegenerateDenominator { s: f64 },

    #[error("step-halving did not converge: last change {change} with {steps} steps")]
    StepHalving { change: f64, steps: usize },

    #[error("no positive-margin time found; worst margin {margin} at s = {s}, t = {t}")]
    CertificationFailed { margin: f64, s: f64, t: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
