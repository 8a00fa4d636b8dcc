use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::grid::{inverse_to_real, GridFunction, GridSpec, SpectralFunction};
use crate::error::{domain, FraxError, Result};
use crate::kernel::{Kernel, LaguerreRule};
use crate::params::Params;

/// Relative size of the zero mode, against h^n Σ|f|, tolerated by
/// negative-order multipliers.
pub const MEAN_ZERO_TOLERANCE: f64 = 1e-10;

/// Samples of u(x, t_j) on the spatial grid times the time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    spec: GridSpec,
    levels: Vec<f64>,
    values: Vec<f64>,
}

impl ExtensionField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        let levels = spec.t_levels();
        if values.len() != levels.len() * spec.len() {
            return Err(FraxError::Shape(format!(
                "{} values for {} levels of {} points",
                values.len(),
                levels.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("extension field has non-finite values"));
        }
        Ok(ExtensionField {
            spec,
            levels,
            values,
        })
    }

    /// Field with the constant value `c` everywhere.
    pub fn constant(spec: GridSpec, c: f64) -> Self {
        let levels = spec.t_levels();
        ExtensionField {
            values: vec![c; levels.len() * spec.len()],
            spec,
            levels,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn t_levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Spatial samples at level j.
    pub fn level(&self, j: usize) -> &[f64] {
        let len = self.spec.len();
        &self.values[j * len..(j + 1) * len]
    }

    pub fn level_function(&self, j: usize) -> GridFunction {
        GridFunction::new(self.spec, self.level(j).to_vec()).expect("levels are finite")
    }
}

/// Which quantity of the extension a field holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// u itself.
    Value,
    /// ∂_t u.
    TimeDerivative,
    /// ∂_{x_d} u.
    Spatial(usize),
    /// (-Δ_x)^(γ/2) u.
    Fractional(f64),
}

/// Spectral data needed to evaluate the extension of one boundary datum at
/// arbitrary levels.
///
/// Symbol values are computed once per distinct radius per level.
#[derive(Debug, Clone)]
pub struct ExtensionPlan {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
    kernel: Kernel,
    radii: Vec<f64>,
    radius_of_mode: Vec<u32>,
}

impl ExtensionPlan {
    pub fn new(f: &GridFunction, prm: &Params, rule: &LaguerreRule) -> Result<Self> {
        let spec = *f.spec();
        let effective: Vec<f64> = (0..spec.len()).map(|i| spec.frequency_norm(i)).collect();
        Self::build(f, prm, rule, effective)
    }

    /// Plan whose symbol is evaluated at |A^{-T} ξ| instead of |ξ|.
    ///
    /// If `f` samples g(x) = h(Ax), the resulting fields are the samples of
    /// u_h(Ax, t), with u_h the extension of h. `matrix` is n×n, row-major.
    pub fn transformed(
        f: &GridFunction,
        prm: &Params,
        rule: &LaguerreRule,
        matrix: &[f64],
    ) -> Result<Self> {
        let spec = *f.spec();
        let n = spec.n;
        if matrix.len() != n * n {
            return Err(FraxError::Shape(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        let inv = invert(matrix, n)?;
        // (A^{-T} ξ)_i = Σ_j inv[j][i] ξ_j.
        let effective = (0..spec.len())
            .map(|flat| {
                let xi = spec.frequency(flat);
                (0..n)
                    .map(|i| {
                        let c: f64 = (0..n).map(|j| inv[j * n + i] * xi[j]).sum();
                        c * c
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Self::build(f, prm, rule, effective)
    }

    fn build(f: &GridFunction, prm: &Params, rule: &LaguerreRule, effective: Vec<f64>) -> Result<Self> {
        prm.check_kernel()?;
        let spec = *f.spec();
        if prm.n != spec.n {
            return Err(FraxError::Shape(format!(
                "params have n = {}, grid has n = {}",
                prm.n, spec.n
            )));
        }
        let mut radii = effective.clone();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let radius_of_mode = effective
            .iter()
            .map(|r| radii.partition_point(|x| x < r) as u32)
            .collect();
        Ok(ExtensionPlan {
            spec,
            coeffs: f.transform().coeffs().to_vec(),
            kernel: Kernel::new(prm.s, rule.clone())?,
            radii,
            radius_of_mode,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Fourier coefficients of the requested component at level t.
    pub fn level_spectrum(&self, component: Component, t: f64) -> SpectralFunction {
        let spec = &self.spec;
        let symbol: Vec<f64> = match component {
            Component::TimeDerivative => self
                .radii
                .iter()
                .map(|&r| r * self.kernel.symbol_prime_at(t * r))
                .collect(),
            _ => self.radii.iter().map(|&r| self.kernel.symbol_at(t * r)).collect(),
        };
        let nyquist = spec.points_per_axis / 2;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let s = symbol[self.radius_of_mode[i] as usize];
                match component {
                    Component::Value | Component::TimeDerivative => c * s,
                    Component::Spatial(d) => {
                        if spec.multi_index(i)[d] == nyquist {
                            Complex64::new(0.0, 0.0)
                        } else {
                            c * Complex64::new(0.0, spec.frequency(i)[d] * s)
                        }
                    }
                    Component::Fractional(g) => c * (s * radial_power(spec.frequency_norm(i), g)),
                }
            })
            .collect();
        SpectralFunction::new(*spec, coeffs).expect("same shape as the plan")
    }

    pub fn level_values(&self, component: Component, t: f64) -> Vec<f64> {
        let spectrum = self.level_spectrum(component, t);
        inverse_to_real(&self.spec, spectrum.coeffs().to_vec())
    }

    /// The requested component on every level of the grid's time range.
    pub fn field(&self, component: Component) -> Result<ExtensionField> {
        if let Component::Spatial(d) = component {
            if d >= self.spec.n {
                return Err(domain(format!("axis {d} out of range for n = {}", self.spec.n)));
            }
        }
        if let Component::Fractional(g) = component {
            if !(g >= 0.0) {
                return Err(domain(format!("fractional component needs gamma >= 0, got {g}")));
            }
        }
        let levels = self.spec.t_levels();
        let per_level: Vec<Vec<f64>> = levels
            .par_iter()
            .map(|&t| self.level_values(component, t))
            .collect();
        ExtensionField::new(self.spec, per_level.concat())
    }

    /// The requested component at arbitrary points (x, t), by direct summation
    /// of the Fourier series. Points sharing a height reuse one spectrum.
    pub fn point_values(&self, component: Component, points: &[(&[f64], f64)]) -> Result<Vec<f64>> {
        let spec = &self.spec;
        for (i, (x, t)) in points.iter().enumerate() {
            if x.len() != spec.n {
                return Err(FraxError::Shape(format!(
                    "point {i} has {} coordinates, expected {}",
                    x.len(),
                    spec.n
                )));
            }
            if !(*t > 0.0) || !t.is_finite() {
                return Err(domain(format!("point {i} has height t = {t}")));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].1.total_cmp(&points[b].1));
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for i in order {
            match groups.last_mut() {
                Some((t, members)) if *t == points[i].1 => members.push(i),
                _ => groups.push((points[i].1, vec![i])),
            }
        }
        let freqs: Vec<[f64; 3]> = (0..spec.len()).map(|i| spec.frequency(i)).collect();
        let scale = 1.0 / (2.0 * spec.half_width).powi(spec.n as i32);
        let evaluated: Vec<Vec<(usize, f64)>> = groups
            .par_iter()
            .map(|(t, members)| {
                let spectrum = self.level_spectrum(component, *t);
                members
                    .iter()
                    .map(|&i| {
                        let x = points[i].0;
                        let sum: f64 = spectrum
                            .coeffs()
                            .iter()
                            .zip(&freqs)
                            .map(|(c, xi)| {
                                let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                                c.re * phase.cos() - c.im * phase.sin()
                            })
                            .sum();
                        (i, sum * scale)
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![0.0; points.len()];
        for (i, v) in evaluated.into_iter().flatten() {
            out[i] = v;
        }
        Ok(out)
    }

    /// ∂_{x_1} u, …, ∂_{x_n} u followed by ∂_t u.
    pub fn gradient(&self) -> Result<Vec<ExtensionField>> {
        let mut out = Vec::with_capacity(self.spec.n + 1);
        for d in 0..self.spec.n {
            out.push(self.field(Component::Spatial(d))?);
        }
        out.push(self.field(Component::TimeDerivative)?);
        Ok(out)
    }
}

/// r^g with 0^0 = 1 and 0^g = 0 for g > 0.
fn radial_power(r: f64, g: f64) -> f64 {
    if g == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(g)
    }
}

/// Inverse of a row-major n×n matrix, n ≤ 3, by cofactors.
fn invert(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let det = match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
    };
    if det == 0.0 || !det.is_finite() {
        return Err(domain("linear map is singular"));
    }
    Ok(match n {
        1 => vec![1.0 / m[0]],
        2 => vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det],
        _ => {
            let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
                m[r0 * 3 + c0] * m[r1 * 3 + c1] - m[r0 * 3 + c1] * m[r1 * 3 + c0]
            };
            vec![
                c(1, 2, 1, 2) / det,
                -c(0, 2, 1, 2) / det,
                c(0, 1, 1, 2) / det,
                -c(1, 2, 0, 2) / det,
                c(0, 2, 0, 2) / det,
                -c(0, 1, 0, 2) / det,
                c(1, 2, 0, 1) / det,
                -c(0, 2, 0, 1) / det,
                c(0, 1, 0, 1) / det,
            ]
        }
    })
}

/// Checks that the zero mode of `f̂` is negligible against h^n Σ|f|.
pub fn check_mean_zero(f: &GridFunction) -> Result<()> {
    let mass: f64 = f.spec().cell_volume() * f.values().iter().map(|v| v.abs()).sum::<f64>();
    let zero = f.integral().abs();
    if zero > MEAN_ZERO_TOLERANCE * mass {
        return Err(FraxError::SingularSymbol(format!(
            "negative order needs mean-zero data; zero mode {zero:e} vs mass {mass:e}"
        )));
    }
    Ok(())
}

/// (-Δ)^(σ/2) f via the multiplier |ξ|^σ; the zero mode is sent to zero
/// (σ = 0 is the identity).
pub fn frac_laplacian(f: &GridFunction, sigma: f64) -> Result<GridFunction> {
    if !sigma.is_finite() {
        return Err(domain("order must be finite"));
    }
    if sigma == 0.0 {
        return Ok(f.clone());
    }
    if sigma < 0.0 {
        check_mean_zero(f)?;
    }
    let spec = *f.spec();
    let mut fh = f.transform();
    for (i, c) in fh.coeffs_mut().iter_mut().enumerate() {
        let r = spec.frequency_norm(i);
        *c *= if r == 0.0 { 0.0 } else { r.powf(sigma) };
    }
    Ok(fh.inverse_transform())
}

/// u(x, t_j) = p_{t_j}^s ∗ f on the grid's time levels.
pub fn extend(f: &GridFunction, prm: &Params) -> Result<ExtensionField> {
    ExtensionPlan::new(f, prm, LaguerreRule::shared())?.field(Component::Value)
}

/// ∂_t u on the grid's time levels.
pub fn dt_field(f: &GridFunction, prm: &Params) -> Result<ExtensionField> {
    ExtensionPlan::new(f, prm, LaguerreRule::shared())?.field(Component::TimeDerivative)
}

/// The n spatial derivatives of u followed by ∂_t u.
pub fn grad_field(f: &GridFunction, prm: &Params) -> Result<Vec<ExtensionField>> {
    ExtensionPlan::new(f, prm, LaguerreRule::shared())?.gradient()
}

/// (-Δ_x)^(γ/2) u on the grid's time levels.
pub fn frac_field(f: &GridFunction, prm: &Params, gamma: f64) -> Result<ExtensionField> {
    ExtensionPlan::new(f, prm, LaguerreRule::shared())?.field(Component::Fractional(gamma))
}

/// Samples of u_h(Ax, t) from samples of g = h∘A, see [`ExtensionPlan::transformed`].
pub fn extend_transformed(
    g: &GridFunction,
    prm: &Params,
    matrix: &[f64],
) -> Result<ExtensionField> {
    ExtensionPlan::transformed(g, prm, LaguerreRule::shared(), matrix)?.field(Component::Value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrices() {
        let m = [2.0, 1.0, 0.5, 0.0, 3.0, 1.0, 1.0, 0.0, 4.0];
        let inv = invert(&m, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_err());
    }

    #[test]
    fn constant_mode_is_preserved() {
        let spec = GridSpec::new(1, 8.0, 32).unwrap().with_t_range(0.01, 50.0, 12).unwrap();
        let f = GridFunction::from_fn(spec, |x| 2.0 + (-x[0] * x[0]).exp()).unwrap();
        let u = extend(&f, &Params::new(1, 0.7).unwrap()).unwrap();
        for j in 0..u.level_count() {
            let m = u.level_function(j).mean();
            assert!((m - f.mean()).abs() < 1e-13, "level {j}: {m}");
        }
    }

    #[test]
    fn point_values_match_grid_levels() {
        let spec = GridSpec::new(2, 6.0, 16).unwrap();
        let f = GridFunction::from_fn(spec, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()).unwrap();
        let prm = Params::new(2, 0.8).unwrap();
        let plan = ExtensionPlan::new(&f, &prm, LaguerreRule::shared()).unwrap();
        let level = plan.level_values(Component::Value, 0.7);
        let coords: Vec<Vec<f64>> = [5usize, 77, 200].iter().map(|&i| spec.point(i)[..2].to_vec()).collect();
        let pts: Vec<(&[f64], f64)> = coords.iter().map(|c| (c.as_slice(), 0.7)).collect();
        let got = plan.point_values(Component::Value, &pts).unwrap();
        for (k, &i) in [5usize, 77, 200].iter().enumerate() {
            assert!((got[k] - level[i]).abs() < 1e-12, "{} vs {}", got[k], level[i]);
        }
    }
}
