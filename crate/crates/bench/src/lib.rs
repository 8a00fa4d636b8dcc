//! Shared fixtures for the benchmarks.

use frax_core::field::{catalog, GridFunction, GridSpec};
use frax_core::functionals::DiscreteMeasure;
use frax_core::Params;

/// The unit Gaussian sampled on `[-L, L)^n` with N points per axis.
pub fn gaussian(n: usize, half_width: f64, points: usize) -> GridFunction {
    let spec = GridSpec::new(n, half_width, points).expect("benchmark grid is valid");
    catalog::by_name("gaussian", n)
        .and_then(|f| f.sample(&spec))
        .expect("catalog entry samples")
}

/// Order s with β = 0.9, γ = 0.75.
pub fn params(n: usize, s: f64) -> Params {
    Params::new(n, s).expect("benchmark order is valid").with_beta(0.9).with_gamma(0.75)
}

/// Unit-density atoms on {t = 1} over [-extent, extent], spacing 1/4.
pub fn slab(extent: f64) -> DiscreteMeasure {
    DiscreteMeasure::slab(1, 1.0, 0.25, extent).expect("slab parameters are valid")
}
