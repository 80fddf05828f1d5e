use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("qubit count {n} must be even")]
    OddQubitCount { n: usize },

    #[error("qubit count {n} outside supported range [{min}, {max}]")]
    QubitCountOutOfRange { n: usize, min: usize, max: usize },

    #[error("gate density q = {q} outside [0, 1]")]
    GateDensityOutOfRange { q: f64 },

    #[error("a {n}-qubit state exceeds the configured cap of {cap} qubits")]
    QubitCapExceeded { n: usize, cap: usize },

    #[error("probability {value:e} at index {index} is not strictly positive")]
    NonPositiveProbability { index: usize, value: f64 },

    #[error("operand sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("target error epsilon = {epsilon} outside (0, 1)")]
    EpsilonOutOfRange { epsilon: f64 },

    #[error("series of length {len} is shorter than the {min}-point filter window")]
    SeriesTooShort { len: usize, min: usize },

    #[error("P has mass {mass:e} at index {index} where Q is zero")]
    AbsoluteContinuity { index: usize, mass: f64 },

    #[error("gap-ratio argument r = {r} is negative")]
    NegativeRatio { r: f64 },

    #[error("sample list is empty")]
    EmptySamples,

    #[error("Fisher system singular after damping (condition estimate {cond:.3e})")]
    SingularFisher { cond: f64 },

    #[error("non-finite {what} at epoch {epoch}")]
    NonFinite { what: &'static str, epoch: usize },

    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },
}

pub type Result<T> = std::result::Result<T, Error>;
