use crate::error::{domain, FraxError, Result};
use crate::field::{check_mean_zero, GridFunction};

/// (h^n Σ|f|^p)^(1/p); p = ∞ gives max |f|.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(domain(format!("exponent p = {p} must be positive")));
    }
    if p == f64::INFINITY {
        return Ok(f.max_abs());
    }
    let sum: f64 = f.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((f.spec().cell_volume() * sum).powf(1.0 / p))
}

/// ((2π)^(-n) Σ_{ξ≠0} |ξ|^(2σ) |f̂(ξ)|² Δξ^n)^(1/2).
pub fn sobolev_dot_norm(f: &GridFunction, sigma: f64) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(domain("order must be finite"));
    }
    if sigma < 0.0 {
        check_mean_zero(f)?;
    }
    let power = f
        .transform()
        .weighted_power(|r| if r == 0.0 { 0.0 } else { r.powf(2.0 * sigma) });
    Ok(power.sqrt())
}

/// h^n Σ_{x≠0} |f(x)|² |x|^(-β), plus the exact integral of |x|^(-β) over the
/// origin cell times |f(0)|² when the origin is a grid point.
pub fn hardy_functional(f: &GridFunction, beta: f64) -> Result<f64> {
    let spec = f.spec();
    let n = spec.n;
    if !(beta > 0.0 && beta < n as f64) {
        return Err(domain(format!("Hardy weight needs 0 < beta < n, got {beta}")));
    }
    let vol = spec.cell_volume();
    let mut origin = None;
    let mut sum = 0.0;
    for (i, v) in f.values().iter().enumerate() {
        let x = spec.point(i);
        let r2: f64 = x[..n].iter().map(|c| c * c).sum();
        if r2 == 0.0 {
            origin = Some(*v);
        } else {
            sum += v * v * r2.powf(-beta / 2.0);
        }
    }
    let mut total = vol * sum;
    if let Some(v0) = origin {
        total += v0 * v0 * cube_singular_integral(n, beta, spec.spacing() / 2.0);
    }
    Ok(total)
}

/// ∫_{[-a,a]^n} |x|^(-β) dx, via the divergence identity for homogeneous
/// functions: (2n a^(n-β)/(n-β)) ∫_{[-1,1]^(n-1)} (1+|z|²)^(-β/2) dz.
pub fn cube_singular_integral(n: usize, beta: f64, a: f64) -> f64 {
    let face = match n {
        1 => 1.0,
        2 => simpson(|z| (1.0 + z * z).powf(-beta / 2.0), -1.0, 1.0, 400),
        _ => simpson(
            |z1| simpson(|z2| (1.0 + z1 * z1 + z2 * z2).powf(-beta / 2.0), -1.0, 1.0, 200),
            -1.0,
            1.0,
            200,
        ),
    };
    2.0 * n as f64 * a.powf(n as f64 - beta) / (n as f64 - beta) * face
}

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64);
    }
    s * h / 3.0
}

/// Tolerance on |‖f‖₂ - 1| accepted by [`entropy`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// h^n Σ |f|² ln|f|² with 0·ln 0 = 0, for ‖f‖₂ = 1.
pub fn entropy(f: &GridFunction) -> Result<f64> {
    let norm = lp_norm(f, 2.0)?;
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(FraxError::Normalization(format!(
            "entropy needs unit L2 norm, got {norm}"
        )));
    }
    let sum: f64 = f
        .values()
        .iter()
        .map(|v| {
            let a = v * v;
            if a == 0.0 {
                0.0
            } else {
                a * a.ln()
            }
        })
        .sum();
    Ok(f.spec().cell_volume() * sum)
}

/// f / ‖f‖₂.
pub fn normalize_l2(f: &GridFunction) -> Result<GridFunction> {
    let norm = lp_norm(f, 2.0)?;
    if !(norm > 0.0) {
        return Err(FraxError::Normalization("cannot normalize the zero function".into()));
    }
    f.scale(1.0 / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_integral_reduces_to_volume_at_zero_order() {
        for n in 1..=3 {
            let v = cube_singular_integral(n, 0.0, 0.5);
            assert!((v - 1.0).abs() < 1e-10, "n={n}: {v}");
        }
    }

    #[test]
    fn cube_integral_in_one_dimension() {
        let v = cube_singular_integral(1, 0.5, 0.25);
        assert!((v - 2.0 * 0.25f64.sqrt() / 0.5).abs() < 1e-14);
    }
}
