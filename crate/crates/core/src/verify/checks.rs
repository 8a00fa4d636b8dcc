use serde::Serialize;

use super::report::{CheckKind, Report};
use crate::error::{domain, Result};
use crate::field::{
    check_mean_zero, frac_laplacian, Component, ExtensionField, ExtensionPlan, GridFunction,
};
use crate::functionals::{
    affine_energy, besov_seminorm_with, entropy, hardy_functional, lp_norm, sobolev_dot_norm,
    weighted_energy, BesovQ, EnergyEstimate, Integrand, ShiftGrid, WeightedEnergySpec,
    NORMALIZATION_TOLERANCE,
};
use crate::kernel::{
    energy_constant_dt, energy_constant_frac, energy_constant_grad, LaguerreRule,
};
use crate::params::Params;

/// Default relative tolerance for identities.
pub const IDENTITY_TOLERANCE: f64 = 0.02;
/// Default tolerance on the spread of ratios under dilation.
pub const STABILITY_TOLERANCE: f64 = 0.05;
/// Default number of sphere directions in the affine energy.
pub const DEFAULT_DIRECTIONS: usize = 64;

/// Which extension energy bounds the boundary functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// |∇_(x,t) u|² t^(1-β).
    Grad,
    /// |∂_t u|² t^(1-β).
    Dt,
    /// |(-Δ)^(γ/2) u|² t^(2γ-β-1).
    Frac,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Grad => "grad",
            Variant::Dt => "dt",
            Variant::Frac => "frac",
        }
    }

    pub const ALL: [Variant; 3] = [Variant::Grad, Variant::Dt, Variant::Frac];
}

/// The weighted L^p characterizations of Besov norms through the extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneralP {
    /// |∇_x u|^p t^(p-1-pβ/2), β ∈ (0, 2).
    #[serde(rename = "eq3.14")]
    SpatialGradient,
    /// |∂_t u|^p t^(p-1-pβ/2), β ∈ (0, 2s).
    #[serde(rename = "eq3.15")]
    TimeDerivative,
    /// |(-Δ)^(γ/2) u|^p t^(p(γ-β/2)-1), γ > β/2.
    #[serde(rename = "eq3.16")]
    Fractional,
    /// |u|^p t^(pβ/2-1) against the order -β/2 seminorm, β ∈ (0, 2n).
    #[serde(rename = "eq3.20")]
    Value,
}

impl GeneralP {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeneralP::SpatialGradient => "eq3.14",
            GeneralP::TimeDerivative => "eq3.15",
            GeneralP::Fractional => "eq3.16",
            GeneralP::Value => "eq3.20",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "eq3.14" => GeneralP::SpatialGradient,
            "eq3.15" => GeneralP::TimeDerivative,
            "eq3.16" => GeneralP::Fractional,
            "eq3.20" => GeneralP::Value,
            other => return Err(domain(format!("unknown general-p display {other:?}"))),
        })
    }
}

/// Settings shared by every check.
#[derive(Debug, Clone)]
pub struct Verifier {
    pub rule: LaguerreRule,
    pub identity_tolerance: f64,
    pub stability_tolerance: f64,
    pub direction_count: usize,
    /// Shift grid for Besov seminorms; `None` picks one from the data grid.
    pub shift_grid: Option<ShiftGrid>,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier {
            rule: LaguerreRule::shared().clone(),
            identity_tolerance: IDENTITY_TOLERANCE,
            stability_tolerance: STABILITY_TOLERANCE,
            direction_count: DEFAULT_DIRECTIONS,
            shift_grid: None,
        }
    }
}

fn positive_beta(prm: &Params) -> Result<()> {
    if !(prm.beta > 0.0) || !prm.beta.is_finite() {
        return Err(domain(format!("beta must be positive, got {}", prm.beta)));
    }
    Ok(())
}

fn window(cond: bool, msg: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(domain(msg))
    }
}

fn check_variant_window(prm: &Params, variant: Variant) -> Result<()> {
    positive_beta(prm)?;
    let (b, s, n) = (prm.beta, prm.s, prm.n as f64);
    window(b < n.min(2.0 * s), format!("need 0 < beta < min(n, 2s), got beta = {b}"))?;
    match variant {
        Variant::Grad => window(b < 2.0, format!("gradient variant needs beta < 2, got {b}")),
        Variant::Dt => Ok(()),
        Variant::Frac => window(
            prm.gamma > b / 2.0,
            format!("fractional variant needs gamma > beta/2, got gamma = {}", prm.gamma),
        ),
    }
}

impl Verifier {
    fn plan(&self, f: &GridFunction, prm: &Params) -> Result<ExtensionPlan> {
        ExtensionPlan::new(f, prm, &self.rule)
    }

    fn shift_grid(&self, f: &GridFunction) -> ShiftGrid {
        self.shift_grid.unwrap_or_else(|| ShiftGrid::for_grid(f))
    }

    /// Weighted energy of the variant's integrand, p = 2.
    pub fn variant_energy(&self, f: &GridFunction, prm: &Params, variant: Variant) -> Result<EnergyEstimate> {
        let plan = self.plan(f, prm)?;
        let (fields, spec) = match variant {
            Variant::Grad => (plan.gradient()?, WeightedEnergySpec::gradient(prm.beta)),
            Variant::Dt => (
                vec![plan.field(Component::TimeDerivative)?],
                WeightedEnergySpec::time_derivative(prm.beta),
            ),
            Variant::Frac => (
                vec![plan.field(Component::Fractional(prm.gamma))?],
                WeightedEnergySpec::frac(prm.gamma, prm.beta),
            ),
        };
        weighted_energy(&fields, &spec)
    }

    fn identity(&self, f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
        positive_beta(prm)?;
        let constant = match variant {
            Variant::Grad => energy_constant_grad(prm, &self.rule)?,
            Variant::Dt => energy_constant_dt(prm, &self.rule)?,
            Variant::Frac => energy_constant_frac(prm, &self.rule)?,
        };
        let energy = self.variant_energy(f, prm, variant)?;
        let beta = prm.beta;
        let spectral = f.transform().weighted_power(|r| r.powf(beta));
        let name = format!("identity-{}", variant.as_str());
        Ok(Report::new(
            name,
            CheckKind::Identity,
            *prm,
            energy.total,
            constant * spectral,
            self.identity_tolerance,
        )
        .with_constant(constant)
        .extra("spectral_sum", spectral)
        .extra("lower_tail", energy.lower_tail)
        .extra("upper_tail", energy.upper_tail)
        .with_tail_warning(energy.tail_warning))
    }

    /// ∫∫ |∇u|² t^(1-β) against the gradient constant times
    /// (2π)^(-n) ∫ |ξ|^β |f̂|².
    pub fn identity_gradient(&self, f: &GridFunction, prm: &Params) -> Result<Report> {
        self.identity(f, prm, Variant::Grad)
    }

    pub fn identity_dt(&self, f: &GridFunction, prm: &Params) -> Result<Report> {
        self.identity(f, prm, Variant::Dt)
    }

    pub fn identity_frac(&self, f: &GridFunction, prm: &Params) -> Result<Report> {
        self.identity(f, prm, Variant::Frac)
    }

    fn inequality(
        &self,
        name: String,
        prm: &Params,
        lhs: f64,
        energy: &EnergyEstimate,
    ) -> Report {
        Report::new(name, CheckKind::Inequality, *prm, lhs, energy.total, self.stability_tolerance)
            .extra("lower_tail", energy.lower_tail)
            .extra("upper_tail", energy.upper_tail)
            .with_tail_warning(energy.tail_warning)
    }

    /// ‖f‖²_{L^(2n/(n-β))} against the variant energy.
    pub fn trace_sobolev(&self, f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
        check_variant_window(prm, variant)?;
        let n = prm.n as f64;
        let lhs = lp_norm(f, 2.0 * n / (n - prm.beta))?.powi(2);
        let energy = self.variant_energy(f, prm, variant)?;
        Ok(self.inequality(format!("trace-sobolev-{}", variant.as_str()), prm, lhs, &energy))
    }

    /// exp((β/n) ∫ |f|² ln|f|²) against the variant energy; f must have unit
    /// L² norm.
    pub fn trace_logsobolev(&self, f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
        check_variant_window(prm, variant)?;
        let ent = entropy(f)?;
        let lhs = (prm.beta / prm.n as f64 * ent).exp();
        let energy = self.variant_energy(f, prm, variant)?;
        Ok(self
            .inequality(format!("trace-logsobolev-{}", variant.as_str()), prm, lhs, &energy)
            .extra("entropy", ent))
    }

    /// ∫ |f|² |x|^(-β) against the variant energy.
    pub fn trace_hardy(&self, f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
        check_variant_window(prm, variant)?;
        let lhs = hardy_functional(f, prm.beta)?;
        let energy = self.variant_energy(f, prm, variant)?;
        Ok(self.inequality(format!("trace-hardy-{}", variant.as_str()), prm, lhs, &energy))
    }

    /// Affine trace inequality from a precomputed extension field `u` (which
    /// may come from a transformed plan) and its t-derivative.
    pub fn affine_trace_fields(
        &self,
        f: &GridFunction,
        prm: &Params,
        u: &ExtensionField,
        dt: &ExtensionField,
    ) -> Result<Report> {
        if !(prm.beta >= 1.0) || !prm.beta.is_finite() {
            return Err(domain(format!("affine trace needs beta >= 1, got {}", prm.beta)));
        }
        check_mean_zero(f)?;
        let n = prm.n as f64;
        let p = 2.0 * (n + prm.beta) / (n + prm.beta + 2.0);
        let alpha = prm.beta - 1.0;
        let aprm = prm.with_p(p).with_alpha(alpha);
        let lhs = sobolev_dot_norm(f, -prm.beta / 2.0)?;
        let energy = affine_energy(u, &aprm, self.direction_count)?;
        let dt_energy = weighted_energy(
            std::slice::from_ref(dt),
            &WeightedEnergySpec::new(Integrand::TimeDerivative, alpha, p)?,
        )?;
        let dt_norm = dt_energy.total.powf(1.0 / p);
        let rhs = energy.value.powf(n / (n + prm.beta)) * dt_norm.powf(prm.beta / (n + prm.beta));
        Ok(Report::new("affine-trace", CheckKind::Inequality, aprm, lhs, rhs, self.stability_tolerance)
            .extra("affine_energy", energy.value)
            .extra("affine_constant", energy.constant)
            .extra("dt_norm", dt_norm)
            .extra("directions", energy.direction_norms.len() as f64)
            .with_tail_warning(energy.tail_warning || dt_energy.tail_warning))
    }

    /// ‖f‖_{Ḣ^(-β/2)} against E_p(u, t^(β-1))^(n/(n+β)) ‖∂_t u‖^(β/(n+β)) with
    /// p = 2(n+β)/(n+β+2).
    pub fn affine_trace(&self, f: &GridFunction, prm: &Params) -> Result<Report> {
        if !(prm.beta >= 1.0) {
            return Err(domain(format!("affine trace needs beta >= 1, got {}", prm.beta)));
        }
        check_mean_zero(f)?;
        let plan = self.plan(f, prm)?;
        let u = plan.field(Component::Value)?;
        let dt = plan.field(Component::TimeDerivative)?;
        self.affine_trace_fields(f, prm, &u, &dt)
    }

    /// Weighted L^p space-time integral of one of the general-p displays
    /// against the matching Besov seminorm to the power p.
    pub fn general_p(&self, f: &GridFunction, prm: &Params, which: GeneralP) -> Result<Report> {
        positive_beta(prm)?;
        let (p, b, s, g) = (prm.p, prm.beta, prm.s, prm.gamma);
        window(p > 1.0 && p.is_finite(), format!("need 1 < p < ∞, got p = {p}"))?;
        let plan = self.plan(f, prm)?;
        let (fields, weight, besov_input, order) = match which {
            GeneralP::SpatialGradient => {
                window(b < 2.0, format!("display needs beta in (0, 2), got {b}"))?;
                let mut fields = plan.gradient()?;
                fields.pop();
                (fields, p - 1.0 - p * b / 2.0, f.clone(), b / 2.0)
            }
            GeneralP::TimeDerivative => {
                window(b < 2.0 * s, format!("display needs beta in (0, 2s), got {b}"))?;
                let fields = vec![plan.field(Component::TimeDerivative)?];
                (fields, p - 1.0 - p * b / 2.0, f.clone(), b / 2.0)
            }
            GeneralP::Fractional => {
                window(g > b / 2.0, format!("display needs gamma > beta/2, got gamma = {g}"))?;
                let fields = vec![plan.field(Component::Fractional(g))?];
                (fields, p * (g - b / 2.0) - 1.0, f.clone(), b / 2.0)
            }
            GeneralP::Value => {
                window(
                    b < 2.0 * prm.n as f64 && b < 4.0,
                    format!("display needs beta in (0, min(2n, 4)), got {b}"),
                )?;
                check_mean_zero(f)?;
                let fields = vec![plan.field(Component::Value)?];
                // Λ_{-β/2} is measured as Λ_{β/2} of (-Δ)^(-β/2) f.
                (fields, p * b / 2.0 - 1.0, frac_laplacian(f, -b)?, b / 2.0)
            }
        };
        let integrand = match which {
            GeneralP::SpatialGradient => Integrand::FullGradient,
            GeneralP::TimeDerivative => Integrand::TimeDerivative,
            GeneralP::Fractional => Integrand::FracLaplacian { gamma: g },
            GeneralP::Value => Integrand::Value,
        };
        let energy = weighted_energy(&fields, &WeightedEnergySpec::new(integrand, weight, p)?)?;
        let grid = self.shift_grid(&besov_input);
        let besov = besov_seminorm_with(&besov_input, order, p, BesovQ::Finite(p), &grid)?;
        let rhs = besov.value.powf(p);
        Ok(Report::new(
            format!("general-p-{}", which.as_str()),
            CheckKind::Inequality,
            *prm,
            energy.total,
            rhs,
            self.stability_tolerance,
        )
        .extra("besov_far_tail", besov.far_tail)
        .extra("besov_near_tail", besov.near_tail)
        .extra("weight_exponent", weight)
        .with_tail_warning(energy.tail_warning))
    }
}

/// Free-function forms using the default [`Verifier`].
pub fn check_identity_gradient(f: &GridFunction, prm: &Params) -> Result<Report> {
    Verifier::default().identity_gradient(f, prm)
}

pub fn check_identity_dt(f: &GridFunction, prm: &Params) -> Result<Report> {
    Verifier::default().identity_dt(f, prm)
}

pub fn check_identity_frac(f: &GridFunction, prm: &Params) -> Result<Report> {
    Verifier::default().identity_frac(f, prm)
}

pub fn check_trace_sobolev(f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
    Verifier::default().trace_sobolev(f, prm, variant)
}

pub fn check_trace_logsobolev(f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
    Verifier::default().trace_logsobolev(f, prm, variant)
}

pub fn check_trace_hardy(f: &GridFunction, prm: &Params, variant: Variant) -> Result<Report> {
    Verifier::default().trace_hardy(f, prm, variant)
}

pub fn check_affine_trace(f: &GridFunction, prm: &Params) -> Result<Report> {
    Verifier::default().affine_trace(f, prm)
}

pub fn check_general_p(f: &GridFunction, prm: &Params, which: GeneralP) -> Result<Report> {
    Verifier::default().general_p(f, prm, which)
}

/// Whether |‖f‖₂ - 1| is within the entropy tolerance.
pub fn is_normalized(f: &GridFunction) -> bool {
    lp_norm(f, 2.0).map_or(false, |v| (v - 1.0).abs() <= NORMALIZATION_TOLERANCE)
}
