//! Fractional Poisson kernel, its Fourier profile and the scalar constants
//! obtained from weighted moments of that profile.
//!
//! The kernel of order s is `p_t(x) = c(n,s) t^s (|x|² + t²)^(-(n+s)/2)`, its
//! transform is `C_{n,s} G_s(t|ξ|)` with
//! `G_s(r) = ∫₀^∞ λ^(s/2-1) exp(-λ - r²/(4λ)) dλ` and `C_{n,s} = 1/Γ(s/2)`.

pub mod quadrature;

use std::f64::consts::{LN_2, PI};

use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{domain, FraxError, Result};
use crate::params::{check_order, Params};

pub use quadrature::{LaguerreRule, DEFAULT_COUNT};
use quadrature::ln_lambda_integral;

/// Normalizations attached to an order s in dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    /// Spatial normalization c(n,s), making ∫ p_t = 1.
    pub c_ns: f64,
    /// Symbol normalization C_{n,s} = 1/Γ(s/2).
    pub symbol_norm: f64,
    pub gamma_s_half: f64,
    /// Γ(s/2) / (2^(1-s) Γ(1-s/2)), the constant linking the Neumann datum of
    /// the extension to (-Δ)^(s/2).
    pub c_s: f64,
}

impl KernelConstants {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        Params::new(n, s)?;
        let nf = n as f64;
        let gamma_s_half = gamma(s / 2.0);
        Ok(KernelConstants {
            c_ns: (ln_gamma((nf + s) / 2.0) - 0.5 * nf * PI.ln() - ln_gamma(s / 2.0)).exp(),
            symbol_norm: 1.0 / gamma_s_half,
            gamma_s_half,
            c_s: gamma_s_half / (2f64.powf(1.0 - s) * gamma(1.0 - s / 2.0)),
        })
    }
}

/// ln G_s(r). Returns ln Γ(s/2) at r = 0.
pub fn ln_eval_g(s: f64, r: f64, rule: &LaguerreRule) -> Result<f64> {
    check_order(s)?;
    check_radius(r)?;
    ln_lambda_integral(s / 2.0, r.ln(), rule)
}

/// G_s(r) = ∫₀^∞ λ^(s/2-1) e^(-λ - r²/(4λ)) dλ.
pub fn eval_g(s: f64, r: f64, rule: &LaguerreRule) -> Result<f64> {
    Ok(ln_eval_g(s, r, rule)?.exp())
}

/// G_s'(r) for r > 0.
///
/// Folding λ ↦ r²/(4λ) turns the derivative into
/// `G_s'(r) = -(r/2)^(s-1) ∫₀^∞ κ^(-s/2) e^(-κ - r²/(4κ)) dκ`, whose integral
/// tends to Γ(1-s/2) as r → 0.
pub fn eval_g_prime(s: f64, r: f64, rule: &LaguerreRule) -> Result<f64> {
    Ok(-ln_neg_g_prime(s, r.ln(), rule)?.exp())
}

/// r^(1-s) G_s'(r); bounded as r → 0 with limit -2^(1-s) Γ(1-s/2).
pub fn scaled_g_prime(s: f64, r: f64, rule: &LaguerreRule) -> Result<f64> {
    check_order(s)?;
    if !(r > 0.0) {
        return Err(domain(format!("G' needs r > 0, got {r}")));
    }
    let ln_h = ln_lambda_integral(1.0 - s / 2.0, r.ln(), rule)?;
    Ok(-((1.0 - s) * LN_2 + ln_h).exp())
}

/// ln(-G_s'(e^{ln_r})), taking the radius in log form.
fn ln_neg_g_prime(s: f64, ln_r: f64, rule: &LaguerreRule) -> Result<f64> {
    check_order(s)?;
    if ln_r == f64::NEG_INFINITY || ln_r.is_nan() {
        return Err(domain("G' is only defined for r > 0"));
    }
    let ln_h = ln_lambda_integral(1.0 - s / 2.0, ln_r, rule)?;
    Ok((s - 1.0) * (ln_r - LN_2) + ln_h)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain(format!("radius must be finite and nonnegative, got {r}")));
    }
    Ok(())
}

/// p_t^s(x) = c(n,s) t^s (|x|² + t²)^(-(n+s)/2).
pub fn poisson_kernel(prm: &Params, x: &[f64], t: f64) -> Result<f64> {
    prm.check_kernel()?;
    if x.len() != prm.n {
        return Err(FraxError::Shape(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            prm.n
        )));
    }
    if !(t > 0.0) {
        return Err(domain(format!("kernel needs t > 0, got {t}")));
    }
    let c = KernelConstants::new(prm.n, prm.s)?.c_ns;
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let e = (prm.n as f64 + prm.s) / 2.0;
    Ok(c * t.powf(prm.s) * (x2 + t * t).powf(-e))
}

/// Fourier symbol of p_t^s at a frequency of norm `xi_norm`: G_s(t|ξ|)/Γ(s/2).
pub fn fourier_symbol(prm: &Params, t: f64, xi_norm: f64, rule: &LaguerreRule) -> Result<f64> {
    prm.check_kernel()?;
    if !(t > 0.0) {
        return Err(domain(format!("symbol needs t > 0, got {t}")));
    }
    check_radius(xi_norm)?;
    let ln_g = ln_eval_g(prm.s, t * xi_norm, rule)?;
    Ok((ln_g - ln_gamma(prm.s / 2.0)).exp())
}

/// Past this radius C G_s(r) and C G_s'(r) are below the smallest subnormal,
/// since both are bounded by r^2 e^(-r).
const UNDERFLOW_RADIUS: f64 = 800.0;

/// Evaluator for a fixed order s, reusing the quadrature rule and Γ(s/2).
#[derive(Debug, Clone)]
pub struct Kernel {
    s: f64,
    ln_gamma_half: f64,
    rule: LaguerreRule,
}

impl Kernel {
    pub fn new(s: f64, rule: LaguerreRule) -> Result<Self> {
        check_order(s)?;
        Ok(Kernel {
            s,
            ln_gamma_half: ln_gamma(s / 2.0),
            rule,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn rule(&self) -> &LaguerreRule {
        &self.rule
    }

    /// Symbol value C G_s(r) at r = t|ξ|.
    pub fn symbol_at(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        if r > UNDERFLOW_RADIUS {
            return 0.0;
        }
        let ln_g = ln_lambda_integral(self.s / 2.0, r.ln(), &self.rule)
            .expect("order validated at construction");
        (ln_g - self.ln_gamma_half).exp()
    }

    /// C G_s'(r) at r = t|ξ| (zero at r = 0, where the t-derivative of the
    /// symbol is multiplied by |ξ| = 0 anyway).
    pub fn symbol_prime_at(&self, r: f64) -> f64 {
        if r == 0.0 || r > UNDERFLOW_RADIUS {
            return 0.0;
        }
        let ln = ln_neg_g_prime(self.s, r.ln(), &self.rule).expect("order validated");
        -(ln - self.ln_gamma_half).exp()
    }
}

/// Which squared profile a radial moment integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Profile {
    Value,
    Derivative,
}

/// ∫₀^∞ P(r)² r^a dr / Γ(s/2)², with P = G_s or G_s'.
///
/// Trapezoid rule in u = ln r with step 20/count; the integrand decays
/// double-exponentially for large r and like c·e^(κu) as u → −∞, and that
/// leading term closes the lower end analytically.
fn radial_moment(s: f64, a: f64, profile: Profile, rule: &LaguerreRule) -> Result<f64> {
    let ln_gh = ln_gamma(s / 2.0);
    let (kappa, ln_c) = match profile {
        Profile::Value => (a + 1.0, 2.0 * ln_gh),
        Profile::Derivative => (
            2.0 * s - 1.0 + a,
            2.0 * ((1.0 - s) * LN_2 + ln_gamma(1.0 - s / 2.0)),
        ),
    };
    if !(kappa > 0.0) {
        return Err(FraxError::DivergentMoment(format!(
            "radial moment with exponent {a} diverges at the origin (order {s})"
        )));
    }
    let ln_integrand = |u: f64| -> Result<f64> {
        let ln_p = match profile {
            Profile::Value => ln_lambda_integral(s / 2.0, u, rule)?,
            Profile::Derivative => ln_neg_g_prime(s, u, rule)?,
        };
        Ok(2.0 * ln_p + (a + 1.0) * u)
    };
    // G_s(r)² ~ π r^(s-1) e^(-2r): negligible past r = 80.
    let u_hi = 80f64.ln();
    let u_lo = (-42.0 / kappa).max(-1500.0).min(-8.0);
    let h = 20.0 / rule.count() as f64;
    let steps = ((u_hi - u_lo) / h).ceil() as usize;
    let h = (u_hi - u_lo) / steps as f64;
    let mut sum = 0.0;
    for k in 0..=steps {
        let u = u_lo + h * k as f64;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        sum += w * ln_integrand(u)?.exp();
    }
    // Leading-order closure of (-∞, u_lo].
    let tail = (ln_c + kappa * u_lo).exp() / kappa;
    Ok((h * sum + tail) / (2.0 * ln_gh).exp())
}

/// C(n,s,a) = Γ(s/2)^(-2) ∫₀^∞ G_s(r)² r^a dr, so that
/// ∫₀^∞ |p̂_t(ξ)|² t^a dt = C(n,s,a) |ξ|^(-(a+1)).
///
/// The integral converges exactly for a > -1 (G_s(0) = Γ(s/2) > 0).
pub fn moment_constant(prm: &Params, a: f64, rule: &LaguerreRule) -> Result<f64> {
    prm.check_kernel()?;
    if !(a > -1.0) {
        return Err(FraxError::DivergentMoment(format!(
            "moment exponent a = {a} must exceed -1"
        )));
    }
    radial_moment(prm.s, a, Profile::Value, rule)
}

/// a(n,s,β) = Γ(s/2)^(-2) ∫₀^∞ G_s'(r)² r^(1-β) dr, the constant in the
/// time-derivative energy identity. Requires 0 < β < 2s.
pub fn energy_constant_dt(prm: &Params, rule: &LaguerreRule) -> Result<f64> {
    prm.check_kernel()?;
    check_beta_dt(prm)?;
    radial_moment(prm.s, 1.0 - prm.beta, Profile::Derivative, rule)
}

/// Γ(s/2)^(-2) [∫ G_s² r^(1-β) dr + ∫ G_s'² r^(1-β) dr], the constant in the
/// full-gradient energy identity. Requires 0 < β < min(2, 2s).
pub fn energy_constant_grad(prm: &Params, rule: &LaguerreRule) -> Result<f64> {
    prm.check_kernel()?;
    check_beta_dt(prm)?;
    if !(prm.beta < 2.0) {
        return Err(FraxError::DivergentMoment(format!(
            "gradient energy needs beta < 2, got {}",
            prm.beta
        )));
    }
    let value = radial_moment(prm.s, 1.0 - prm.beta, Profile::Value, rule)?;
    let deriv = radial_moment(prm.s, 1.0 - prm.beta, Profile::Derivative, rule)?;
    Ok(value + deriv)
}

/// Γ(s/2)^(-2) ∫ G_s² r^(2γ-β-1) dr, the constant in the fractional-Laplacian
/// energy identity. Requires γ > β/2 (moment exponent above -1).
pub fn energy_constant_frac(prm: &Params, rule: &LaguerreRule) -> Result<f64> {
    prm.check_kernel()?;
    if !(prm.beta > 0.0) {
        return Err(domain(format!("beta must be positive, got {}", prm.beta)));
    }
    let a = 2.0 * prm.gamma - prm.beta - 1.0;
    if !(a > -1.0) || !(prm.gamma > 0.0) {
        return Err(FraxError::DivergentMoment(format!(
            "fractional energy needs gamma > beta/2, got gamma = {}, beta = {}",
            prm.gamma, prm.beta
        )));
    }
    radial_moment(prm.s, a, Profile::Value, rule)
}

fn check_beta_dt(prm: &Params) -> Result<()> {
    if !(prm.beta > 0.0) {
        return Err(domain(format!("beta must be positive, got {}", prm.beta)));
    }
    if !(prm.beta < 2.0 * prm.s) {
        return Err(FraxError::DivergentMoment(format!(
            "beta = {} must be below 2s = {}",
            prm.beta,
            2.0 * prm.s
        )));
    }
    Ok(())
}

/// Relative change of a constant when the quadrature count doubles.
pub fn refinement_change(
    rule_count: usize,
    f: impl Fn(&LaguerreRule) -> Result<f64>,
) -> Result<f64> {
    let coarse = f(&LaguerreRule::new(rule_count)?)?;
    let fine = f(&LaguerreRule::new(2 * rule_count)?)?;
    Ok((fine / coarse - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule() -> LaguerreRule {
        LaguerreRule::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn g_at_zero_is_gamma() {
        for &s in &[0.25, 0.5, 1.0, 1.5, 1.9] {
            let v = eval_g(s, 0.0, &rule()).unwrap();
            assert!(rel(v, gamma(s / 2.0)) < 1e-14);
        }
    }

    #[test]
    fn g_order_one_closed_form() {
        for &r in &[0.1, 1.0, 5.0] {
            let v = eval_g(1.0, r, &rule()).unwrap();
            assert!(rel(v, PI.sqrt() * (-r as f64).exp()) < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn g_prime_order_one_closed_form() {
        for &r in &[0.5, 1.0, 2.0] {
            let v = eval_g_prime(1.0, r, &rule()).unwrap();
            assert!(rel(v, -PI.sqrt() * (-r as f64).exp()) < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn g_decays_exponentially() {
        assert!(eval_g(1.5, 10.0, &rule()).unwrap() < 1e-3);
    }

    #[test]
    fn g_prime_needs_positive_radius() {
        assert!(eval_g_prime(1.0, 0.0, &rule()).is_err());
        assert!(scaled_g_prime(1.0, 0.0, &rule()).is_err());
    }

    #[test]
    fn rejects_orders_outside_window() {
        assert!(eval_g(0.0, 1.0, &rule()).is_err());
        assert!(eval_g(2.0, 1.0, &rule()).is_err());
        assert!(KernelConstants::new(1, 2.5).is_err());
    }

    #[test]
    fn classical_poisson_normalization() {
        let prm = Params::new(1, 1.0).unwrap();
        let v = poisson_kernel(&prm, &[0.0], 1.0).unwrap();
        assert!(rel(v, 1.0 / PI) < 1e-15);
        assert!(poisson_kernel(&prm, &[0.0], 0.0).is_err());
    }

    #[test]
    fn kernel_constants_relations() {
        for n in 1..=3 {
            for &s in &[0.25, 0.5, 1.0, 1.5, 1.9] {
                let k = KernelConstants::new(n, s).unwrap();
                let direct = gamma((n as f64 + s) / 2.0)
                    / (PI.powf(n as f64 / 2.0) * gamma(s / 2.0));
                assert!(rel(k.c_ns, direct) < 1e-13);
                assert!(rel(k.symbol_norm * eval_g(s, 0.0, &rule()).unwrap(), 1.0) < 1e-14);
            }
        }
    }

    #[test]
    fn moment_constant_order_one() {
        let prm = Params::new(1, 1.0).unwrap();
        assert!(rel(moment_constant(&prm, 1.0, &rule()).unwrap(), 0.25) < 1e-8);
        assert!(rel(moment_constant(&prm, 0.0, &rule()).unwrap(), 0.5) < 1e-8);
        assert!(matches!(
            moment_constant(&prm, -2.0, &rule()),
            Err(FraxError::DivergentMoment(_))
        ));
    }

    #[test]
    fn energy_constants_order_one() {
        let prm = Params::new(1, 1.0).unwrap().with_beta(1.0);
        assert!(rel(energy_constant_dt(&prm, &rule()).unwrap(), 0.5) < 1e-8);
        assert!(rel(energy_constant_grad(&prm, &rule()).unwrap(), 1.0) < 1e-8);
        let steep = prm.with_beta(1.9);
        let expected = gamma(0.1) / 2f64.powf(0.1);
        assert!(rel(energy_constant_dt(&steep, &rule()).unwrap(), expected) < 1e-8);
        assert!(energy_constant_dt(&prm.with_beta(2.0), &rule()).is_err());
    }

    #[test]
    fn frac_constant_window() {
        let prm = Params::new(1, 1.0).unwrap().with_beta(1.0).with_gamma(1.0);
        assert!(rel(energy_constant_frac(&prm, &rule()).unwrap(), 0.5) < 1e-8);
        let half = prm.with_beta(0.5);
        let expected = gamma(1.5) / 2f64.powf(1.5);
        assert!(rel(energy_constant_frac(&half, &rule()).unwrap(), expected) < 1e-8);
        // γ = (β - s)/2 is rejected, and so is anything up to γ = β/2.
        assert!(energy_constant_frac(&prm.with_gamma(0.0), &rule()).is_err());
        assert!(energy_constant_frac(&prm.with_gamma(0.5), &rule()).is_err());
    }
}
