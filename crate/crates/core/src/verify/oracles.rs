//! Kernel-level identities checked against independent numerical pipelines.

use rayon::prelude::*;

use super::report::{CheckKind, Report};
use crate::error::{domain, Result};
use crate::field::{GridFunction, GridSpec};
use crate::functionals::integrate_levels;
use crate::kernel::{fourier_symbol, moment_constant, KernelConstants, LaguerreRule};
use crate::params::Params;

/// ∫_ρ^∞ r^(n-1) (r² + t²)^(-(n+s)/2) dr, via r = ρ v^(-1/s), which makes the
/// integrand smooth on (0, 1].
fn radial_tail(n: usize, s: f64, t: f64, rho: f64) -> f64 {
    let e = (n as f64 + s) / 2.0;
    let g = |v: f64| (1.0 + (t / rho).powi(2) * v.powf(2.0 / s)).powf(-e);
    rho.powf(-s) / s * crate::functionals::simpson(g, 0.0, 1.0, 400)
}

/// Kernel mass outside the cube [-a, a]^n (n ≤ 2).
fn mass_outside_cube(prm: &Params, t: f64, a: f64) -> Result<f64> {
    let c = KernelConstants::new(prm.n, prm.s)?.c_ns * t.powf(prm.s);
    match prm.n {
        1 => Ok(2.0 * c * radial_tail(1, prm.s, t, a)),
        2 => Ok(8.0
            * c
            * crate::functionals::simpson(
                |th| radial_tail(2, prm.s, t, a / th.cos()),
                0.0,
                std::f64::consts::FRAC_PI_4,
                200,
            )),
        _ => Err(domain("periodized kernel is implemented for n <= 2")),
    }
}

/// Samples of Σ_m p_t(x + 2Lm) on the box: images with |m|_∞ ≤ `images`
/// summed directly, the rest replaced by their mean (kernel mass outside the
/// summed block spread uniformly over the box).
pub fn periodized_kernel(prm: &Params, t: f64, spec: &GridSpec, images: usize) -> Result<GridFunction> {
    prm.check_kernel()?;
    if prm.n != spec.n {
        return Err(domain("params and grid disagree on the dimension"));
    }
    let period = 2.0 * spec.half_width;
    let tail = mass_outside_cube(prm, t, period * (images as f64 + 0.5))?;
    let uniform = tail / period.powi(spec.n as i32);
    let c = KernelConstants::new(prm.n, prm.s)?.c_ns * t.powf(prm.s);
    let e = -(prm.n as f64 + prm.s) / 2.0;
    let m = images as i64;
    let values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let x = spec.point(i);
            let mut sum = 0.0;
            match spec.n {
                1 => {
                    for a in -m..=m {
                        let y = x[0] + period * a as f64;
                        sum += (y * y + t * t).powf(e);
                    }
                }
                _ => {
                    for a in -m..=m {
                        let y0 = x[0] + period * a as f64;
                        for b in -m..=m {
                            let y1 = x[1] + period * b as f64;
                            sum += (y0 * y0 + y1 * y1 + t * t).powf(e);
                        }
                    }
                }
            }
            c * sum + uniform
        })
        .collect();
    GridFunction::new(*spec, values)
}

/// Largest relative error between the discrete transform of the periodized
/// kernel and C_{n,s} G_s(t|ξ|) over the `modes` lowest frequencies.
pub fn check_symbol_identity(
    prm: &Params,
    t: f64,
    spec: &GridSpec,
    modes: usize,
    images: usize,
    rule: &LaguerreRule,
    tolerance: f64,
) -> Result<Report> {
    let kernel = periodized_kernel(prm, t, spec, images)?;
    let fh = kernel.transform();
    let mut order: Vec<usize> = (0..spec.len()).collect();
    order.sort_by_key(|&i| (spec.frequency_key(i), i));
    let mut worst: f64 = 0.0;
    let mut worst_freq = 0.0;
    for &i in order.iter().take(modes) {
        let r = spec.frequency_norm(i);
        let exact = fourier_symbol(prm, t, r, rule)?;
        let got = fh.coeffs()[i];
        let err = ((got.re - exact).powi(2) + got.im.powi(2)).sqrt() / exact;
        if err > worst {
            worst = err;
            worst_freq = r;
        }
    }
    Ok(Report::new(
        format!("symbol-identity-n{}-s{}", prm.n, prm.s),
        CheckKind::Oracle,
        *prm,
        worst,
        1.0,
        tolerance,
    )
    .extra("t", t)
    .extra("modes", modes.min(spec.len()) as f64)
    .extra("worst_frequency", worst_freq))
}

/// ∫₀^∞ |p̂_t(ξ)|² t^a dt by a log-trapezoid in t, against C(n,s,a)|ξ|^(-(a+1)).
pub fn check_moment_identity(
    prm: &Params,
    a: f64,
    xi: f64,
    rule: &LaguerreRule,
    tolerance: f64,
) -> Result<Report> {
    if !(xi > 0.0) {
        return Err(domain("moment identity needs |ξ| > 0"));
    }
    let constant = moment_constant(prm, a, rule)?;
    let (t_lo, t_hi) = (1e-6 / xi, 80.0 / xi);
    let count = 1201;
    let step = (t_hi / t_lo).ln() / (count - 1) as f64;
    let levels: Vec<f64> = (0..count).map(|j| t_lo * (step * j as f64).exp()).collect();
    let dens = levels
        .iter()
        .map(|&t| fourier_symbol(prm, t, xi, rule).map(|v| v * v))
        .collect::<Result<Vec<f64>>>()?;
    let est = integrate_levels(&levels, &dens, a, step);
    let rhs = constant * xi.powf(-(a + 1.0));
    let rel = (est.total / rhs - 1.0).abs();
    Ok(Report::new(
        format!("moment-identity-s{}-a{}-xi{}", prm.s, a, xi),
        CheckKind::Oracle,
        *prm,
        rel,
        1.0,
        tolerance,
    )
    .with_constant(constant)
    .extra("quadrature", est.total)
    .extra("predicted", rhs))
}
