//! Smooth, fast-decaying boundary data used by the checks.

use serde::Serialize;

use super::grid::{GridFunction, GridSpec};
use crate::error::{domain, Result};

/// Analytic shape of a catalog entry, before dilation and translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// exp(-|x|²/(2σ²)).
    Gaussian { sigma: f64 },
    /// exp(1 - 1/(1 - |x|²/R²)) inside the ball of radius R, 0 outside.
    Bump { radius: f64 },
    /// Smooth step: 1 on |x| ≤ inner, 0 on |x| ≥ outer.
    Plateau { inner: f64, outer: f64 },
    /// Boundary trace of the affine Sobolev extremal profile,
    /// (1 + |x|^(1+1/p))^(-(1+n+α-p)/p).
    Extremizer { p: f64, alpha: f64 },
    /// exp(-|x|²/(2σ₁²))/σ₁ⁿ - exp(-|x|²/(2σ₂²))/σ₂ⁿ, which has zero mean.
    GaussianDifference { sigma1: f64, sigma2: f64 },
}

impl Profile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let n = x.len() as i32;
        match *self {
            Profile::Gaussian { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
            Profile::Bump { radius } => {
                let z = r2 / (radius * radius);
                if z >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - z)).exp()
                }
            }
            Profile::Plateau { inner, outer } => {
                let r = r2.sqrt();
                smooth_step((outer - r) / (outer - inner))
            }
            Profile::Extremizer { p, alpha } => {
                let e = (1.0 + n as f64 + alpha - p) / p;
                (1.0 + r2.sqrt().powf(1.0 + 1.0 / p)).powf(-e)
            }
            Profile::GaussianDifference { sigma1, sigma2 } => {
                (-r2 / (2.0 * sigma1 * sigma1)).exp() / sigma1.powi(n)
                    - (-r2 / (2.0 * sigma2 * sigma2)).exp() / sigma2.powi(n)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Gaussian { sigma } => sigma > 0.0,
            Profile::Bump { radius } => radius > 0.0,
            Profile::Plateau { inner, outer } => inner >= 0.0 && outer > inner,
            Profile::Extremizer { p, alpha } => p > 1.0 && alpha >= 0.0,
            Profile::GaussianDifference { sigma1, sigma2 } => {
                sigma1 > 0.0 && sigma2 > 0.0 && sigma1 != sigma2
            }
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid profile parameters {self:?}")))
        }
    }
}

/// C^∞ transition from 0 (z ≤ 0) to 1 (z ≥ 1).
fn smooth_step(z: f64) -> f64 {
    let bump = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let a = bump(z);
    let b = bump(1.0 - z);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// A profile with amplitude, dilation and translation:
/// `f(x) = amplitude · profile(dilation · (x - center))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub name: String,
    pub profile: Profile,
    pub amplitude: f64,
    pub dilation: f64,
    pub center: Vec<f64>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, profile: Profile, n: usize) -> Result<Self> {
        profile.validate()?;
        Ok(TestFunction {
            name: name.into(),
            profile,
            amplitude: 1.0,
            dilation: 1.0,
            center: vec![0.0; n],
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// f(λ·): dilation multiplies by λ.
    pub fn dilated(mut self, lambda: f64) -> Self {
        self.dilation *= lambda;
        self
    }

    pub fn translated(mut self, shift: &[f64]) -> Self {
        for (c, s) in self.center.iter_mut().zip(shift) {
            *c += s;
        }
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut y = [0.0; 3];
        for d in 0..self.dim() {
            y[d] = self.dilation * (x[d] - self.center[d]);
        }
        self.amplitude * self.profile.eval(&y[..self.dim()])
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridFunction> {
        self.check_dim(spec)?;
        GridFunction::from_fn(*spec, |x| self.eval(x))
    }

    /// Samples of x ↦ f(Ax) for a row-major n×n matrix A.
    pub fn sample_transformed(&self, spec: &GridSpec, matrix: &[f64]) -> Result<GridFunction> {
        self.check_dim(spec)?;
        let n = spec.n;
        if matrix.len() != n * n {
            return Err(domain("matrix size does not match dimension"));
        }
        GridFunction::from_fn(*spec, |x| {
            let mut y = [0.0; 3];
            for i in 0..n {
                y[i] = (0..n).map(|j| matrix[i * n + j] * x[j]).sum();
            }
            self.eval(&y[..n])
        })
    }

    fn check_dim(&self, spec: &GridSpec) -> Result<()> {
        if spec.n != self.dim() {
            return Err(domain(format!(
                "function lives in dimension {}, grid in {}",
                self.dim(),
                spec.n
            )));
        }
        Ok(())
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 6] = [
    "gaussian",
    "gaussian-narrow",
    "bump",
    "plateau",
    "extremizer",
    "gaussian-difference",
];

/// A named catalog entry in dimension n.
pub fn by_name(name: &str, n: usize) -> Result<TestFunction> {
    let profile = match name {
        "gaussian" => Profile::Gaussian { sigma: 1.0 },
        "gaussian-narrow" => Profile::Gaussian { sigma: 0.5 },
        "bump" => Profile::Bump { radius: 2.0 },
        "plateau" => Profile::Plateau {
            inner: 2.0,
            outer: 3.0,
        },
        "extremizer" => Profile::Extremizer { p: 2.0, alpha: 12.0 },
        "gaussian-difference" => Profile::GaussianDifference {
            sigma1: 1.0,
            sigma2: 1.5,
        },
        other => {
            return Err(domain(format!(
                "unknown catalog function {other:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    };
    TestFunction::new(name, profile, n)
}

/// Every named entry in dimension n.
pub fn standard(n: usize) -> Vec<TestFunction> {
    NAMES
        .iter()
        .map(|name| by_name(name, n).expect("catalog names are valid"))
        .collect()
}

/// Dilates f(λ·) for λ = 2^(k·step), k = 0..count.
pub fn dilation_sweep(base: &TestFunction, count: usize, log2_step: f64) -> Vec<TestFunction> {
    (0..count)
        .map(|k| {
            let lambda = (log2_step * k as f64).exp2();
            base.clone()
                .dilated(lambda)
                .renamed(format!("{}@{lambda}", base.name))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn plateau_is_one_inside() {
        let f = by_name("plateau", 2).unwrap();
        assert_eq!(f.eval(&[1.0, 1.0]), 1.0);
        assert_eq!(f.eval(&[3.0, 0.1]), 0.0);
    }

    #[test]
    fn difference_has_zero_mean() {
        let f = by_name("gaussian-difference", 1).unwrap();
        let spec = GridSpec::new(1, 16.0, 256).unwrap();
        let g = f.sample(&spec).unwrap();
        assert!(g.integral().abs() < 1e-12);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(by_name("nope", 1).is_err());
    }
}
