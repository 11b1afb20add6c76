//! Crate-wide error type.

use crate::utility::Basket;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, evaluation, and the numeric routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{context}: entry {index} must be strictly positive, got {value}")]
    NonPositive {
        context: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("{context}: value {value} is not finite")]
    NonFinite { context: &'static str, value: f64 },

    #[error("utility evaluation must be strictly positive and finite, got {value}")]
    InvalidUtilityValue { value: f64 },

    #[error("knot grid must be strictly increasing (knot {index}: {value} after {previous})")]
    NonIncreasingKnots {
        index: usize,
        previous: f64,
        value: f64,
    },

    #[error("gauge map queried at {value}, outside tabulated range [{lo}, {hi}]")]
    GaugeOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error(
        "samples do not share a foliation: {first:?} and {second:?} sit on one level \
         of the first utility ({level}) but map to {a} and {b}"
    )]
    NotSameFoliation {
        first: Basket,
        second: Basket,
        level: f64,
        a: f64,
        b: f64,
    },

    #[error("fitted pairs violate monotonicity at level {level}: {a} then {b}")]
    NonMonotone { level: f64, a: f64, b: f64 },

    #[error("need at least two samples at distinct utility levels")]
    InsufficientSamples,

    #[error("ray search never attained level {level} (reached utility {reached})")]
    LevelNotAttained { level: f64, reached: f64 },

    #[error("minimization did not converge after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linear system is numerically singular")]
    SingularSystem,

    #[error("cost {cost} is outside the attainable range of the cost-of-living curve")]
    CostOutOfRange { cost: f64 },

    #[error("flow left the positive cost domain near t = {time} (cost {cost})")]
    FlowEscape { time: f64, cost: f64 },

    #[error("generator span [{want_from}, {want_to}] is outside its domain [{lo}, {hi}]")]
    GeneratorDomain {
        want_from: f64,
        want_to: f64,
        lo: f64,
        hi: f64,
    },

    #[error(
        "adjustments do not chain: earlier ends at {earlier_end}, later starts at {later_start}"
    )]
    TimeMismatch { earlier_end: f64, later_start: f64 },

    #[error(
        "adjustment spans [{have_from}, {have_to}] but the requested interval is \
         [{want_from}, {want_to}]"
    )]
    SpanMismatch {
        have_from: f64,
        have_to: f64,
        want_from: f64,
        want_to: f64,
    },

    #[error("invalid adjustment: {reason}")]
    InvalidAdjustment { reason: &'static str },

    #[error("time {time} is not on the scenario grid")]
    TimeNotOnGrid { time: f64 },

    #[error("scenario times must be strictly increasing")]
    NonIncreasingTimes,

    #[error(
        "index routes disagree: price ratio {price_route} vs adjusted-cost ratio {cost_route}"
    )]
    RouteMismatch { price_route: f64, cost_route: f64 },
}
