use serde::Serialize;

use crate::error::{domain, FraxError, Result};
use crate::field::ExtensionField;

/// Share of the total carried by the extrapolated tails above which the
/// estimate is flagged.
pub const TAIL_WARNING_FRACTION: f64 = 0.05;

/// What a weighted energy integrates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Integrand {
    /// |∇_(x,t) u|.
    FullGradient,
    /// |∂_t u|.
    TimeDerivative,
    /// |(-Δ)^(γ/2) u|.
    FracLaplacian { gamma: f64 },
    /// |u| itself, or any single component.
    Value,
}

/// ∫∫ |component|^p t^w dx dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedEnergySpec {
    pub weight_exponent: f64,
    pub integrand: Integrand,
    pub exponent: f64,
}

impl WeightedEnergySpec {
    pub fn new(integrand: Integrand, weight_exponent: f64, exponent: f64) -> Result<Self> {
        if !weight_exponent.is_finite() {
            return Err(domain("weight exponent must be finite"));
        }
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(domain(format!("exponent p = {exponent} must be positive and finite")));
        }
        Ok(WeightedEnergySpec {
            weight_exponent,
            integrand,
            exponent,
        })
    }

    /// |∇u|² t^(1-β).
    pub fn gradient(beta: f64) -> Self {
        WeightedEnergySpec {
            weight_exponent: 1.0 - beta,
            integrand: Integrand::FullGradient,
            exponent: 2.0,
        }
    }

    /// |∂_t u|² t^(1-β).
    pub fn time_derivative(beta: f64) -> Self {
        WeightedEnergySpec {
            weight_exponent: 1.0 - beta,
            integrand: Integrand::TimeDerivative,
            exponent: 2.0,
        }
    }

    /// |(-Δ)^(γ/2) u|² t^(2γ-β-1).
    pub fn frac(gamma: f64, beta: f64) -> Self {
        WeightedEnergySpec {
            weight_exponent: 2.0 * gamma - beta - 1.0,
            integrand: Integrand::FracLaplacian { gamma },
            exponent: 2.0,
        }
    }

    /// Checks that the quadratic energy converges at t → 0 for an extension of
    /// order s: the weight must be integrable against the small-t behaviour of
    /// the integrand.
    pub fn check_admissible(&self, s: f64) -> Result<()> {
        let w = self.weight_exponent;
        // |∂_t u|² behaves like t^(2s-2) as t → 0; the other integrands stay bounded.
        let ok = match self.integrand {
            Integrand::FullGradient => w > -1.0 && w > 1.0 - 2.0 * s,
            Integrand::TimeDerivative => w > 1.0 - 2.0 * s,
            Integrand::FracLaplacian { .. } | Integrand::Value => w > -1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(FraxError::DivergentMoment(format!(
                "weight t^{w} is not integrable for {:?} at order {s}",
                self.integrand
            )))
        }
    }
}

/// Result of a weighted space-time integral over the discrete levels plus
/// power-law extrapolation below t_min and above t_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub total: f64,
    pub interior: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    /// Fitted log-slope of t^(w+1)·(level density) over the first decade.
    pub lower_slope: f64,
    /// Same over the last decade.
    pub upper_slope: f64,
    pub tail_warning: bool,
}

/// Spatial integral h^n Σ_x (Σ_c comp_c(x)²)^(p/2) at every level.
pub fn level_densities(components: &[ExtensionField], exponent: f64) -> Result<Vec<f64>> {
    let first = components
        .first()
        .ok_or_else(|| FraxError::Shape("no field components".into()))?;
    let spec = first.spec();
    for c in components {
        if c.spec() != spec {
            return Err(FraxError::Shape("components live on different grids".into()));
        }
    }
    let vol = spec.cell_volume();
    let len = spec.len();
    Ok((0..first.level_count())
        .map(|j| {
            let mut sum = 0.0;
            for i in 0..len {
                let sq: f64 = components.iter().map(|c| c.level(j)[i].powi(2)).sum();
                sum += if exponent == 2.0 { sq } else { sq.powf(exponent / 2.0) };
            }
            vol * sum
        })
        .collect())
}

/// ∫∫ |components|^p t^w dx dt over the half-space.
///
/// For p = 2 the integral splits over components and each one gets its own
/// tail fit, so that components with different small-t power laws are
/// extrapolated separately.
pub fn weighted_energy(
    components: &[ExtensionField],
    spec: &WeightedEnergySpec,
) -> Result<EnergyEstimate> {
    level_densities(components, spec.exponent)?;
    let levels = components[0].t_levels();
    let log_step = components[0].spec().log_step();
    if spec.exponent != 2.0 || components.len() == 1 {
        let densities = level_densities(components, spec.exponent)?;
        return Ok(integrate_levels(levels, &densities, spec.weight_exponent, log_step));
    }
    let parts = components
        .iter()
        .map(|c| {
            let d = level_densities(std::slice::from_ref(c), 2.0)?;
            Ok(integrate_levels(levels, &d, spec.weight_exponent, log_step))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(&parts))
}

/// Sum of independent estimates; slopes are taken from the part with the
/// largest lower (resp. upper) tail.
pub fn combine(parts: &[EnergyEstimate]) -> EnergyEstimate {
    let pick = |key: fn(&EnergyEstimate) -> f64| {
        parts
            .iter()
            .max_by(|a, b| key(a).total_cmp(&key(b)))
            .copied()
            .expect("at least one part")
    };
    let lo = pick(|e| e.lower_tail);
    let hi = pick(|e| e.upper_tail);
    let total: f64 = parts.iter().map(|e| e.total).sum();
    let lower_tail: f64 = parts.iter().map(|e| e.lower_tail).sum();
    let upper_tail: f64 = parts.iter().map(|e| e.upper_tail).sum();
    EnergyEstimate {
        total,
        interior: parts.iter().map(|e| e.interior).sum(),
        lower_tail,
        upper_tail,
        lower_slope: lo.lower_slope,
        upper_slope: hi.upper_slope,
        tail_warning: parts.iter().any(|e| e.tail_warning && e.total > 0.0)
            || (total > 0.0 && lower_tail + upper_tail > TAIL_WARNING_FRACTION * total),
    }
}

/// Log-trapezoid rule for ∫ D(t) t^w dt on geometric levels, with both ends
/// closed by a fitted power law.
pub fn integrate_levels(levels: &[f64], densities: &[f64], w: f64, log_step: f64) -> EnergyEstimate {
    let g: Vec<f64> = levels
        .iter()
        .zip(densities)
        .map(|(&t, &d)| d * t.powf(w + 1.0))
        .collect();
    let m = g.len();
    let mut interior = 0.0;
    for (j, v) in g.iter().enumerate() {
        let wt = if j == 0 || j + 1 == m { 0.5 } else { 1.0 };
        interior += wt * v;
    }
    interior *= log_step;

    let decade = (10f64.ln() / log_step).round().max(1.0) as usize;
    let lo_window = decade.min(m - 1);
    let lower_slope = log_slope(&levels[..=lo_window], &g[..=lo_window]);
    let upper_slope = log_slope(&levels[m - 1 - lo_window..], &g[m - 1 - lo_window..]);

    let mut warn = false;
    let lower_tail = if g[0] == 0.0 {
        0.0
    } else if lower_slope > 0.0 {
        g[0] / lower_slope
    } else {
        warn = true;
        0.0
    };
    let upper_tail = if g[m - 1] == 0.0 {
        0.0
    } else if upper_slope < 0.0 {
        g[m - 1] / -upper_slope
    } else {
        warn = true;
        0.0
    };
    let total = interior + lower_tail + upper_tail;
    if total > 0.0 && (lower_tail + upper_tail) > TAIL_WARNING_FRACTION * total {
        warn = true;
    }
    EnergyEstimate {
        total,
        interior,
        lower_tail,
        upper_tail,
        lower_slope,
        upper_slope,
        tail_warning: warn,
    }
}

/// Least-squares slope of ln g against ln t over the positive samples.
fn log_slope(t: &[f64], g: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(g)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&t, &v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_with_cutoff_is_integrated_with_tails() {
        // D(t) = e^{-t}, w = 0.5: ∫ t^0.5 e^{-t} dt = Γ(1.5).
        let m = 161;
        let (a, b) = (1e-4f64, 60.0f64);
        let step = (b / a).ln() / (m - 1) as f64;
        let levels: Vec<f64> = (0..m).map(|j| a * (step * j as f64).exp()).collect();
        let d: Vec<f64> = levels.iter().map(|t| (-t).exp()).collect();
        let est = integrate_levels(&levels, &d, 0.5, step);
        let exact = statrs::function::gamma::gamma(1.5);
        assert!((est.total / exact - 1.0).abs() < 1e-6, "{est:?}");
        assert!(!est.tail_warning);
        assert!((est.lower_slope - 1.5).abs() < 1e-3);
    }

    #[test]
    fn flat_profile_raises_warning() {
        let levels: Vec<f64> = (0..20).map(|j| 0.01 * 1.5f64.powi(j)).collect();
        let d: Vec<f64> = levels.iter().map(|t| 1.0 / t).collect();
        let est = integrate_levels(&levels, &d, 0.0, 1.5f64.ln());
        assert!(est.tail_warning);
    }
}
