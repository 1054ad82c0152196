//! Fresnel-domain phase retrieval with the modified Gerchberg-Saxton
//! algorithm (MGSA).
//!
//! Given intensity measurements in two parallel planes separated by a
//! distance `z`, the MGSA alternates between the planes with a discrete
//! Fresnel propagator, replacing the computed amplitude by the measured one
//! at every half step while keeping the computed phase. For fixed physical
//! parameters (wavelength, distance, pixel pitch) the propagator's sample
//! count `N = λz/δx²` is dictated by the sampling condition and usually
//! exceeds the measured image width, so the computational domain carries a
//! padding zone with no measured amplitude. This crate implements the three
//! ways of handling that zone:
//!
//! * [`PaddingStrategy::Zero`] — force the padding amplitude to zero,
//! * [`PaddingStrategy::Constant`] — fill it with a fixed amplitude, swept
//!   over an interval to pick the best value,
//! * [`PaddingStrategy::Variable`] — let the padding evolve freely under
//!   diffraction and only re-impose the measured amplitude inside the image
//!   region.
//!
//! Module map:
//!
//! * [`field_grid`] — complex field lattices and the embed/crop geometry
//!   between the image region and the computational domain.
//! * [`fresnel`] — the FFT-based discrete Fresnel transform and its exact
//!   inverse, plus the sampling-condition arithmetic.
//! * [`padding`] — amplitude-constraint application per strategy and the
//!   construction of the initial field.
//! * [`gsa`] — the retrieval loop, convergence trace, and the constant-fill
//!   sweep driver.
//! * [`metrics`] — Pearson correlation and maximum-error reconstruction
//!   metrics.
//! * [`oracle`] — a brute-force quadrature propagator for validating the
//!   FFT path on small grids.

pub mod field_grid;
pub mod fresnel;
pub mod gsa;
pub mod metrics;
pub mod oracle;
pub mod padding;

pub use field_grid::{crop, embed, FieldGrid, OpticalSetup};
pub use fresnel::{required_samples, sampling_distance, FresnelKernel};
pub use gsa::{
    run_mgsa, sweep_constant, ConvergenceTrace, RetrievalProblem, RetrievalResult, SweepOutcome,
    TraceRecord,
};
pub use metrics::{correlation, max_error_percent, CorrelationValue};
pub use oracle::{direct_fresnel, OracleConfig};
pub use padding::{apply_constraint, initial_field, PaddingStrategy};

/// Errors produced by any module in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid is not square: {rows} rows x {cols} cols")]
    NotSquare { rows: usize, cols: usize },

    #[error("grid side must be at least 1")]
    EmptyGrid,

    #[error("pixel pitch must be positive, got {0}")]
    NonPositivePitch(f64),

    #[error("{name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("index {index} out of range for side {side}")]
    IndexOutOfRange { index: usize, side: usize },

    #[error("side mismatch: got {got}, expected {expected} ({context})")]
    SideMismatch {
        got: usize,
        expected: usize,
        context: &'static str,
    },

    #[error(
        "image exceeds Fresnel computational domain: \
         N = {required} samples < image side {image_side}"
    )]
    DomainTooSmall { required: usize, image_side: usize },

    #[error("non-finite sample at ({row}, {col}): divergence or invalid input")]
    NonFinite { row: usize, col: usize },

    #[error("amplitude at ({row}, {col}) is {value}, expected a finite value >= 0")]
    NegativeAmplitude { row: usize, col: usize, value: f64 },

    #[error("amplitude at ({row}, {col}) is {value}, expected a value in [0, 1]")]
    AmplitudeOutOfRange { row: usize, col: usize, value: f64 },

    #[error("constant padding amplitude must satisfy 0 < c, got {0}")]
    InvalidPaddingAmplitude(f64),

    #[error("correlation undefined: {which} array has zero variance")]
    ZeroVariance { which: &'static str },

    #[error("maximum error undefined: reference array is identically zero")]
    ZeroReference,

    #[error("oracle grid side {0} exceeds the supported maximum of {max}", max = crate::oracle::MAX_ORACLE_SIDE)]
    OracleTooLarge(usize),

    #[error("empty sweep set: c_min {c_min}, c_max {c_max}, step {step}")]
    EmptySweep { c_min: f64, c_max: f64, step: f64 },

    #[error("sweep requires at least one iteration to rank padding amplitudes")]
    SweepWithoutIterations,
}

pub type Result<T> = std::result::Result<T, Error>;
