use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Analytic parameter bundle shared by every operation.
///
/// Each operation validates only the fields it uses, against its own
/// admissibility window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Spatial dimension, 1..=3.
    pub n: usize,
    /// Extension order, in (0, 2).
    pub s: f64,
    /// Derivative (smoothness) order.
    pub beta: f64,
    /// Order of the fractional Laplacian in the third energy variant.
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub q0: f64,
    /// Exponent of the weight t^alpha.
    pub alpha: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 1,
            s: 1.0,
            beta: 1.0,
            gamma: 1.0,
            p: 2.0,
            q: 2.0,
            q0: 2.0,
            alpha: 0.0,
        }
    }
}

impl Params {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        let prm = Params {
            n,
            s,
            ..Params::default()
        };
        prm.check_dimension()?;
        check_order(s)?;
        Ok(prm)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_q0(mut self, q0: f64) -> Self {
        self.q0 = q0;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn check_dimension(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(domain(format!("dimension n = {} not in 1..=3", self.n)));
        }
        Ok(())
    }

    /// Validates `n` and `s`, the two fields every kernel evaluation needs.
    pub fn check_kernel(&self) -> Result<()> {
        self.check_dimension()?;
        check_order(self.s)
    }
}

/// Rejects extension orders outside the open interval (0, 2).
pub fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 2.0) {
        return Err(domain(format!("extension order s = {s} not in (0, 2)")));
    }
    Ok(())
}
