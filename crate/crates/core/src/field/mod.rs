//! Periodic grids, the discrete Fourier transform and the extension fields.

pub mod catalog;
mod extension;
mod grid;
mod io;

pub use extension::{
    check_mean_zero, dt_field, extend, extend_transformed, frac_field, frac_laplacian,
    grad_field, Component, ExtensionField, ExtensionPlan, MEAN_ZERO_TOLERANCE,
};
pub use grid::{
    inverse_transform, transform, GridFunction, GridSpec, SpectralFunction, DEFAULT_LOG_STEP,
};
pub use io::PAYLOAD_ENCODING;
pub use rustfft::num_complex::Complex64;
