//! Centralized numeric tolerances.
//!
//! Every threshold used by the library is defined here; no other module
//! hard-codes a comparison epsilon.

/// State-norm agreement after normalization or unitary application.
pub const NORM: f64 = 1e-10;

/// Hermiticity defect allowed in a conditional density matrix.
pub const HERMITICITY: f64 = 1e-10;

/// Maximum coherent-state weight that may be discarded by a Fock cutoff.
pub const TAIL: f64 = 1e-12;

/// Below this detection probability, conditioning is flagged unreliable.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Norm drift allowed for a single mixer or phase application.
pub const UNITARITY: f64 = 1e-12;

/// Snapshot of the tolerance set, for run metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub hermiticity: f64,
    pub tail: f64,
    pub probability_floor: f64,
    pub unitarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: NORM,
            hermiticity: HERMITICITY,
            tail: TAIL,
            probability_floor: PROBABILITY_FLOOR,
            unitarity: UNITARITY,
        }
    }
}
