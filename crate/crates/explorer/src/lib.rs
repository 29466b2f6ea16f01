//! Exploration front-end for the interferometric qubit source: parameter
//! sweeps, working-regime optimization, figure-data emission and full
//! cross-engine verification runs.

pub mod config;
pub mod emit;
pub mod error;
pub mod optimize;
pub mod presets;
pub mod sweep;
pub mod verify;

pub use error::ExplorerError;

pub type Result<T> = std::result::Result<T, ExplorerError>;
