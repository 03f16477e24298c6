use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid range: x_min = {x_min}, x_max = {x_max}, n_points = {n_points}")]
    InvalidRange { x_min: f64, x_max: f64, n_points: usize },
    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid too coarse: norm after transform deviates from 1 by {deviation:e}")]
    GridTooCoarse { deviation: f64 },
    #[error("Hermite order {n} exceeds the supported maximum {max}")]
    HermiteOrder { n: usize, max: usize },
    #[error("density is not normalized: total mass {mass}")]
    NotNormalized { mass: f64 },
    #[error("density has negative value {value} at index {index}")]
    NegativeDensity { index: usize, value: f64 },
    #[error("samples are not monotone at index {index}")]
    NotMonotone { index: usize },
    #[error("density has zero total mass")]
    DegenerateDensity,
    #[error("wavefunction is identically zero")]
    ZeroState,
    #[error("wavefunction leaks past the grid edge: |amplitude| = {amplitude:e}")]
    EdgeLeakage { amplitude: f64 },
    #[error("grid does not span the state: edge amplitude {amplitude:e} in {representation} representation")]
    GridSpan {
        amplitude: f64,
        representation: &'static str,
    },
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("operation requires the {expected} representation")]
    Representation { expected: &'static str },
    #[error("point {value} lies outside the supported region")]
    Unsupported { value: f64 },
    #[error("joint distribution misses mass: integral = {mass}")]
    Coverage { mass: f64 },
    #[error("b schedule must move monotonically toward {toward}")]
    ScheduleDirection { toward: &'static str },
    #[error("need at least {required} samples, got {found}")]
    SampleCount { required: usize, found: usize },
    #[error(
        "no convex combination reproduces the quantum global correlation {quantum} \
         (causal range [{minus}, {plus}])"
    )]
    Infeasible { quantum: f64, plus: f64, minus: f64 },
    #[error("collective coordinates are not canonical: bracket {bracket} where {expected} is required")]
    NonCanonical { bracket: f64, expected: f64 },
    #[error("coordinate pair does not commute or is not a listed collective pair")]
    UnsupportedPair,
}

pub type Result<T> = core::result::Result<T, Error>;
