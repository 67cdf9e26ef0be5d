//! Impulsive tree–grass savanna model.
//!
//! Sensitive trees, non-sensitive trees and grass compete between periodic
//! fires. The crate provides the vector field and fire map ([`model`]),
//! closed-form thresholds and their classification ([`thresholds`]), a
//! nonstandard finite-difference integrator with a fourth-order reference
//! ([`integrator`]), numerical Floquet analysis of periodic orbits
//! ([`floquet`]) and two-parameter threshold scans ([`sweep`]).

pub mod cli;
pub mod error;
pub mod floquet;
pub mod format;
pub mod integrator;
pub mod model;
pub mod sweep;
pub mod thresholds;

pub use error::{Error, Result};
pub use model::{ModelParams, ParamName, VegState};
