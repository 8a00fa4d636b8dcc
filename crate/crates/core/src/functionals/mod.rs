//! Scalar functionals of boundary data and extension fields.

mod affine;
mod besov;
mod energy;
mod lorentz;
mod maximal;
mod measure;
mod norms;
mod sphere;

pub use affine::{affine_constant, affine_energy, spatial_gradient, AffineEnergy};
pub use besov::{
    besov_seminorm, besov_seminorm_with, besov_sobolev_constant, difference_norm,
    line_difference_constant, BesovEstimate, BesovQ, ShiftGrid,
};
pub use energy::{
    combine, integrate_levels, level_densities, weighted_energy, EnergyEstimate, Integrand,
    WeightedEnergySpec, TAIL_WARNING_FRACTION,
};
pub use lorentz::{lorentz_norm, LorentzP};
pub use maximal::{maximal_function, maximal_radii, nontangential_max};
pub use measure::{Atom, DiscreteMeasure};
pub use norms::{
    cube_singular_integral, entropy, hardy_functional, lp_norm, normalize_l2, sobolev_dot_norm,
    simpson, NORMALIZATION_TOLERANCE,
};
pub use sphere::{ball_volume, sphere_area, SphereGrid};
