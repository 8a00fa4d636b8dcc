//! Numerics for the fractional Poisson (Caffarelli–Silvestre) extension.

pub mod carleson;
pub mod error;
pub mod field;
pub mod functionals;
pub mod kernel;
pub mod params;
pub mod verify;

pub use error::{FraxError, Result};
pub use params::Params;
