//! Quadrature rules behind the kernel profile and its moments.
//!
//! Two routes evaluate the λ-integral
//!
//! ```text
//! I(a, r) = ∫₀^∞ λ^(a-1) exp(-λ - r²/(4λ)) dλ,   a > 0,
//! ```
//!
//! * for `r >= SADDLE_SWITCH` the integral is split at the saddle λ = r/2 and
//!   the lower half is folded onto the upper one with λ ↦ r²/(4λ); both halves
//!   are then smooth against the weight e^(-y) and a Gauss–Laguerre rule is
//!   spectrally accurate;
//! * below that, the integrand develops a boundary layer at λ ~ r² that no
//!   fixed Gauss rule resolves, so the integral is taken in v = ln λ, where the
//!   integrand decays double-exponentially on both sides and the trapezoid
//!   rule converges geometrically.

use std::f64::consts::LN_2;

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, FraxError, Result};

/// Default node count.
pub const DEFAULT_COUNT: usize = 200;

/// Radii at or above this use the saddle-split Gauss–Laguerre route.
pub const SADDLE_SWITCH: f64 = 2.0;

// Integrand values below exp(-WINDOW_DROP) relative to the peak are dropped.
const WINDOW_DROP: f64 = 46.0;
// Largest trapezoid step allowed in v = ln λ.
const MAX_LOG_STEP: f64 = 0.3;

/// Gauss–Laguerre rule for ∫₀^∞ x^α e^(-x) g(x) dx.
///
/// Weights are kept in log form as well: for 200 nodes the weights of the
/// largest nodes are below the smallest positive `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreRule {
    alpha: f64,
    nodes: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl Default for LaguerreRule {
    fn default() -> Self {
        LaguerreRule::new(DEFAULT_COUNT).expect("default Laguerre rule")
    }
}

impl LaguerreRule {
    /// Process-wide default rule, built once.
    pub fn shared() -> &'static LaguerreRule {
        static RULE: std::sync::OnceLock<LaguerreRule> = std::sync::OnceLock::new();
        RULE.get_or_init(LaguerreRule::default)
    }

    /// Standard rule (α = 0) with `count` nodes.
    pub fn new(count: usize) -> Result<Self> {
        Self::generalized(count, 0.0)
    }

    /// Generalized rule for the weight x^α e^(-x), α > -1.
    ///
    /// Nodes are the eigenvalues of the Jacobi matrix (implicit QL), polished
    /// by Newton steps on the orthonormal recurrence; weights follow from the
    /// Christoffel function at the polished nodes.
    pub fn generalized(count: usize, alpha: f64) -> Result<Self> {
        if count < 2 {
            return Err(domain(format!("Laguerre rule needs at least 2 nodes, got {count}")));
        }
        if !(alpha > -1.0) {
            return Err(domain(format!("Laguerre weight exponent {alpha} must exceed -1")));
        }
        let mut diag: Vec<f64> = (0..count).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let mut off: Vec<f64> = (0..count)
            .map(|k| if k == 0 { 0.0 } else { (k as f64 * (k as f64 + alpha)).sqrt() })
            .collect();
        tridiagonal_eigenvalues(&mut diag, &mut off)?;
        diag.sort_by(|a, b| a.total_cmp(b));

        let ln_mu0 = ln_gamma(alpha + 1.0);
        let mut nodes = Vec::with_capacity(count);
        let mut ln_weights = Vec::with_capacity(count);
        for &guess in &diag {
            let mut x = guess;
            for _ in 0..4 {
                let (ratio, _) = recurrence(x, count, alpha, ln_mu0);
                let step = ratio;
                x -= step;
                if step.abs() <= 1e-16 * x.abs() {
                    break;
                }
            }
            let (_, ln_christoffel_sum) = recurrence(x, count, alpha, ln_mu0);
            nodes.push(x);
            ln_weights.push(-ln_christoffel_sum);
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(FraxError::NonConvergence(
                    "Laguerre nodes are not strictly increasing".into(),
                ));
            }
        }
        Ok(LaguerreRule {
            alpha,
            nodes,
            ln_weights,
        })
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// Weights as plain floats; the trailing ones underflow to zero.
    pub fn weights(&self) -> Vec<f64> {
        self.ln_weights.iter().map(|lw| lw.exp()).collect()
    }

    /// ∫₀^∞ x^α e^(-x) g(x) dx.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(|(&x, &lw)| lw.exp() * g(x))
            .sum()
    }

    /// Relative error of the rule on ∫₀^∞ x^α e^(-x) dx = Γ(α+1).
    pub fn self_test(&self) -> f64 {
        let approx = self.integrate(|_| 1.0);
        let exact = ln_gamma(self.alpha + 1.0).exp();
        (approx / exact - 1.0).abs()
    }

    /// Natural log of ∫₀^∞ λ^(a-1) exp(-λ - r²/(4λ)) dλ for a > 0, r > 0,
    /// via the saddle split. Intended for r ≥ [`SADDLE_SWITCH`].
    fn ln_lambda_integral_saddle(&self, a: f64, r: f64) -> f64 {
        let c = 0.5 * r;
        let ln_c = c.ln();
        // Each half is e^(-r) Σ w_i (c+y_i)^b exp(c y_i/(c+y_i)), with
        // b = a-1 below the saddle and b = -a-1 (times c^(2a)) above it.
        let shift = 2.0 * a * ln_c;
        let mut terms = Vec::with_capacity(2 * self.nodes.len());
        for (&y, &lw) in self.nodes.iter().zip(&self.ln_weights) {
            let ln_cy = (c + y).ln();
            let common = lw + c * y / (c + y);
            terms.push(common + (a - 1.0) * ln_cy);
            terms.push(common + (-a - 1.0) * ln_cy + shift);
        }
        -r + log_sum_exp(&terms)
    }
}

/// Natural log of I(a, r) = ∫₀^∞ λ^(a-1) exp(-λ - r²/(4λ)) dλ.
///
/// `ln_r` is the natural log of r (−∞ for r = 0) so that radii whose square
/// underflows are still handled.
pub fn ln_lambda_integral(a: f64, ln_r: f64, rule: &LaguerreRule) -> Result<f64> {
    if !(a > 0.0) || a.is_nan() {
        return Err(domain(format!("λ-integral exponent a = {a} must be positive")));
    }
    if ln_r == f64::NEG_INFINITY {
        return Ok(ln_gamma(a));
    }
    if ln_r.is_nan() || ln_r == f64::INFINITY {
        return Err(domain("λ-integral radius must be finite"));
    }
    let r = ln_r.exp();
    if r >= SADDLE_SWITCH {
        Ok(rule.ln_lambda_integral_saddle(a, r))
    } else {
        Ok(ln_lambda_integral_trapezoid(a, ln_r, rule.count()))
    }
}

/// Trapezoid route in v = ln λ; valid for every r > 0.
pub fn ln_lambda_integral_trapezoid(a: f64, ln_r: f64, count: usize) -> f64 {
    // φ(v) = a v − e^v − (r²/4) e^(−v), concave, with its peak where
    // e^(2v) − a e^v − r²/4 = 0.
    let ln_q = 2.0 * ln_r - 2.0 * LN_2; // ln(r²/4)
    let phi = |v: f64| a * v - v.exp() - (ln_q - v).exp();
    // e^{v*} = (a + sqrt(a² + r²)) / 2, written to stay finite for tiny r.
    let r = ln_r.exp();
    let v_star = ((a + a.hypot(r)) * 0.5).ln();
    let phi_star = phi(v_star);
    let target = phi_star - WINDOW_DROP;

    let find_edge = |dir: f64| -> f64 {
        let mut step = 1.0;
        let mut inner = v_star;
        let mut outer = v_star + dir * step;
        while phi(outer) > target {
            inner = outer;
            step *= 2.0;
            outer = v_star + dir * step;
        }
        for _ in 0..40 {
            let mid = 0.5 * (inner + outer);
            if phi(mid) > target {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        outer
    };
    let lo = find_edge(-1.0);
    let hi = find_edge(1.0);
    let nodes = count.max(((hi - lo) / MAX_LOG_STEP).ceil() as usize).max(2);
    let h = (hi - lo) / (nodes - 1) as f64;
    let mut sum = 0.0;
    for k in 0..nodes {
        let v = lo + h * k as f64;
        let weight = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
        sum += weight * (phi(v) - phi_star).exp();
    }
    phi_star + (h * sum).ln()
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Runs the orthonormal Laguerre recurrence at `x`.
///
/// Returns the Newton step p_n / p_n' and ln Σ_{k<n} p_k(x)², with p_k the
/// orthonormal polynomials for the weight x^α e^(-x). Values are rescaled on
/// the fly so that large nodes do not overflow.
fn recurrence(x: f64, n: usize, alpha: f64, ln_mu0: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let mut p_prev = 0.0;
    let mut p = 1.0; // p_0 times exp(ln_mu0 / 2)
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut b_prev = 0.0;
    let mut sum = 0.0;
    let mut ln_scale = -0.5 * ln_mu0;
    for k in 0..n {
        sum += p * p;
        let a_k = 2.0 * k as f64 + alpha + 1.0;
        let b_next = ((k + 1) as f64 * (k as f64 + 1.0 + alpha)).sqrt();
        let p_next = ((x - a_k) * p - b_prev * p_prev) / b_next;
        let dp_next = (p + (x - a_k) * dp - b_prev * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        b_prev = b_next;
        if p.abs() > BIG || dp.abs() > BIG {
            p /= BIG;
            p_prev /= BIG;
            dp /= BIG;
            dp_prev /= BIG;
            sum /= BIG * BIG;
            ln_scale += BIG.ln();
        }
    }
    (p / dp, sum.ln() + 2.0 * ln_scale)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `off[k]` couples rows k-1 and k; `off[0]` is ignored.
/// On return `diag` holds the eigenvalues (unsorted).
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { off[i + 1] } else { 0.0 }).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(FraxError::NonConvergence("tridiagonal QL iteration".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
