use rayon::prelude::*;
use serde::Serialize;

use super::energy::{integrate_levels, EnergyEstimate};
use super::sphere::{ball_volume, SphereGrid};
use crate::error::{domain, Result};
use crate::field::{inverse_transform, Complex64, ExtensionField, SpectralFunction};
use crate::params::Params;

/// c_{n,p} = (nω_n)^(1/n) (nω_n ω_(p-1) / (2ω_(n+p-2)))^(1/p), with ω_k the
/// Γ-continued unit-ball volume.
pub fn affine_constant(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let wn = ball_volume(nf);
    (nf * wn).powf(1.0 / nf)
        * (nf * wn * ball_volume(p - 1.0) / (2.0 * ball_volume(nf + p - 2.0))).powf(1.0 / p)
}

/// Affine energy together with the per-direction norms it was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineEnergy {
    pub value: f64,
    pub constant: f64,
    /// ‖∇_ξ g‖_{L^p(t^α)} for each sampled direction ξ.
    pub direction_norms: Vec<f64>,
    /// Some directional norm vanished, so the energy is infinite.
    pub infinite: bool,
    pub tail_warning: bool,
}

/// Spatial gradient of every level, spectrally (Nyquist mode dropped).
pub fn spatial_gradient(u: &ExtensionField) -> Vec<Vec<f64>> {
    let spec = *u.spec();
    let n = spec.n;
    let nyquist = spec.points_per_axis / 2;
    let per_level: Vec<Vec<Vec<f64>>> = (0..u.level_count())
        .into_par_iter()
        .map(|j| {
            let fh = u.level_function(j).transform();
            (0..n)
                .map(|d| {
                    let coeffs: Vec<Complex64> = fh
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| {
                            if spec.multi_index(i)[d] == nyquist {
                                Complex64::new(0.0, 0.0)
                            } else {
                                c * Complex64::new(0.0, spec.frequency(i)[d])
                            }
                        })
                        .collect();
                    let s = SpectralFunction::new(spec, coeffs).expect("same shape");
                    inverse_transform(&s).into_values()
                })
                .collect()
        })
        .collect();
    // Reassemble as one flat level-major array per component.
    (0..n)
        .map(|d| per_level.iter().flat_map(|lv| lv[d].iter().copied()).collect())
        .collect()
}

/// `E_p(g, t^α) = c_{n,p} (∫_{S^(n-1)} ‖ξ·∇_x g‖_{L^p(t^α)}^(-n) dξ)^(-1/n)`
/// with α = `prm.alpha` and p = `prm.p`.
pub fn affine_energy(u: &ExtensionField, prm: &Params, direction_count: usize) -> Result<AffineEnergy> {
    let spec = *u.spec();
    let n = spec.n;
    if prm.n != n {
        return Err(domain("params and field disagree on the dimension"));
    }
    if !(prm.p >= 1.0) || !prm.p.is_finite() {
        return Err(domain(format!("affine energy needs p >= 1, got {}", prm.p)));
    }
    if !(prm.alpha >= 0.0) {
        return Err(domain(format!("weight exponent alpha = {} must be >= 0", prm.alpha)));
    }
    let dirs = SphereGrid::new(n, direction_count)?;
    let grad = spatial_gradient(u);
    let len = spec.len();
    let vol = spec.cell_volume();
    let levels = u.t_levels().to_vec();
    let log_step = spec.log_step();
    let p = prm.p;

    let estimates: Vec<EnergyEstimate> = (0..dirs.len())
        .into_par_iter()
        .map(|k| {
            let xi = dirs.direction(k);
            let densities: Vec<f64> = (0..levels.len())
                .map(|j| {
                    let base = j * len;
                    let sum: f64 = (0..len)
                        .map(|i| {
                            let dv: f64 = (0..n).map(|d| xi[d] * grad[d][base + i]).sum();
                            dv.abs().powf(p)
                        })
                        .sum();
                    vol * sum
                })
                .collect();
            integrate_levels(&levels, &densities, prm.alpha, log_step)
        })
        .collect();

    let norms: Vec<f64> = estimates.iter().map(|e| e.total.powf(1.0 / p)).collect();
    let constant = affine_constant(n, p);
    let infinite = norms.iter().any(|&v| v == 0.0);
    let value = if infinite {
        f64::INFINITY
    } else {
        let integral: f64 = norms.iter().map(|v| v.powf(-(n as f64))).sum::<f64>() * dirs.weight();
        constant * integral.powf(-1.0 / n as f64)
    };
    Ok(AffineEnergy {
        value,
        constant,
        direction_norms: norms,
        infinite,
        tail_warning: estimates.iter().any(|e| e.tail_warning),
    })
}
