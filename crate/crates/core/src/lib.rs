//! Simulation and analysis of a conditional double-Mach-Zehnder qubit source.
//!
//! Two cascaded Mach-Zehnder interferometers on three optical modes `a`, `b`,
//! `c` are fed with a single photon (mode `b`) and a weak coherent state
//! (mode `c`). Detecting the photon content of modes `b` and `c` heralds a
//! vacuum/one-photon superposition `a0|0> + a1|1>` on mode `a`.
//!
//! The crate keeps two independent computational routes for every quantity of
//! interest:
//!
//! - a numeric engine ([`fock`], [`device`], [`measurement`]) that propagates
//!   the full three-mode state in a truncated Fock basis and conditions on
//!   diagonal detector POMs, and
//! - a closed-form engine ([`analytic`]) that evaluates the exact expressions
//!   for the same probabilities, conditional-state coefficients and
//!   fidelities.
//!
//! The two routes agree to ~1e-10 on desk-scale cutoffs, so any disagreement
//! localises a bug rather than a truncation artifact.

pub mod analytic;
pub mod device;
pub mod error;
pub mod fock;
pub mod measurement;
pub mod tol;

mod linalg;

pub use error::Error;
pub use fock::{DensityMatrix, FockCutoff, Mode, MultiModeState};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
