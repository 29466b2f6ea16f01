use thiserror::Error;

/// Errors raised by state construction and conditioning.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff must satisfy n_max >= 1 (got {0})")]
    InvalidCutoff(usize),

    #[error(
        "coherent amplitude |z| = {z_abs} leaves tail weight {tail:.3e} above {limit:.3e} \
         at n_max = {n_max}; use n_max >= {required}"
    )]
    TailToleranceExceeded {
        z_abs: f64,
        n_max: usize,
        tail: f64,
        limit: f64,
        required: usize,
    },

    #[error("raising mode occupation past n_max = {n_max} would discard weight {weight:.3e}")]
    CutoffOverflow { n_max: usize, weight: f64 },

    #[error("states have mismatched shape: {0} vs {1}")]
    ShapeMismatch(usize, usize),

    #[error("zero-norm state rejected")]
    ZeroNormState,

    #[error("modes must be distinct")]
    IdenticalModes,

    #[error("quantum efficiency must lie in [0, 1] (got {0})")]
    InvalidEta(f64),

    #[error("photon number {n} out of range 0..={n_max}")]
    PhotonNumberOutOfRange { n: usize, n_max: usize },

    #[error("POM weight vector has length {got}, expected {expected}")]
    WeightLengthMismatch { got: usize, expected: usize },

    #[error("POM weights must lie in [0, 1]")]
    InvalidWeights,

    #[error("conditional state undefined: both superposition weights vanish")]
    DegenerateState,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
