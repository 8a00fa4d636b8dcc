use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, FraxError, Result};

/// Largest step in ln t used when a grid picks its own level count.
pub const DEFAULT_LOG_STEP: f64 = 0.25;

/// Discretization of the half-space: a periodic box `[-L, L)^n` with N points
/// per axis, and M geometric time levels in `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

impl GridSpec {
    /// Box grid with the default time range `[h·1e-4, 8L]` and a level count
    /// keeping consecutive levels within a factor e^0.25.
    pub fn new(n: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        let h = 2.0 * half_width / points_per_axis as f64;
        let t_min = h * 1e-4;
        let t_max = 8.0 * half_width;
        let spec = GridSpec {
            n,
            half_width,
            points_per_axis,
            t_min,
            t_max,
            t_count: level_count_for(t_min, t_max),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_t_range(mut self, t_min: f64, t_max: f64, t_count: usize) -> Result<Self> {
        self.t_min = t_min;
        self.t_max = t_max;
        self.t_count = t_count;
        self.validate()?;
        Ok(self)
    }

    /// Time range `[t_min, t_max]` with the default level density.
    pub fn with_t_bounds(self, t_min: f64, t_max: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(domain(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
        }
        self.with_t_range(t_min, t_max, level_count_for(t_min, t_max))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(domain(format!("dimension n = {} not in 1..=3", self.n)));
        }
        if self.points_per_axis < 2 || !self.points_per_axis.is_power_of_two() {
            return Err(domain(format!(
                "points per axis must be a power of two >= 2, got {}",
                self.points_per_axis
            )));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(domain(format!("half width must be positive, got {}", self.half_width)));
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min) || !self.t_max.is_finite() {
            return Err(domain(format!(
                "need 0 < t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.t_count < 2 {
            return Err(domain("at least two time levels are required"));
        }
        Ok(())
    }

    /// Grid spacing h = 2L/N.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Volume h^n of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Frequency spacing π/L.
    pub fn frequency_step(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Number of grid points, N^n.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Geometric time levels `t_j = t_min (t_max/t_min)^(j/(M-1))`.
    pub fn t_levels(&self) -> Vec<f64> {
        let m = self.t_count;
        let ratio = (self.t_max / self.t_min).ln();
        (0..m)
            .map(|j| {
                if j + 1 == m {
                    self.t_max
                } else {
                    self.t_min * (ratio * j as f64 / (m - 1) as f64).exp()
                }
            })
            .collect()
    }

    /// Step of the time grid in ln t.
    pub fn log_step(&self) -> f64 {
        (self.t_max / self.t_min).ln() / (self.t_count - 1) as f64
    }

    /// Multi-index of a flat position; axis 0 varies slowest.
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let big_n = self.points_per_axis;
        let mut idx = [0usize; 3];
        for d in (0..self.n).rev() {
            idx[d] = flat % big_n;
            flat /= big_n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.n)
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Coordinates `x_d = -L + i_d h` of a flat position (unused axes are 0).
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for d in 0..self.n {
            x[d] = -self.half_width + h * idx[d] as f64;
        }
        x
    }

    /// Signed frequency index in `[-N/2, N/2)` for a raw FFT index.
    pub fn signed_index(&self, k: usize) -> i64 {
        let big_n = self.points_per_axis;
        if k < big_n / 2 {
            k as i64
        } else {
            k as i64 - big_n as i64
        }
    }

    /// Frequency vector ξ = π k / L of a flat spectral position.
    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let step = self.frequency_step();
        let idx = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for d in 0..self.n {
            xi[d] = step * self.signed_index(idx[d]) as f64;
        }
        xi
    }

    /// Σ k_d² over signed indices; |ξ|² = (π/L)² times this.
    pub fn frequency_key(&self, flat: usize) -> u64 {
        let idx = self.multi_index(flat);
        (0..self.n)
            .map(|d| {
                let k = self.signed_index(idx[d]);
                (k * k) as u64
            })
            .sum()
    }

    pub fn frequency_norm(&self, flat: usize) -> f64 {
        self.frequency_step() * (self.frequency_key(flat) as f64).sqrt()
    }

    /// Flat index of the mode -ξ.
    pub fn mirror_index(&self, flat: usize) -> usize {
        let big_n = self.points_per_axis;
        let idx = self.multi_index(flat);
        let mut out = [0usize; 3];
        for d in 0..self.n {
            out[d] = (big_n - idx[d]) % big_n;
        }
        self.flat_index(&out[..self.n])
    }

    /// Whether `other` describes the same spatial box (time ranges may differ).
    pub fn same_box(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && self.points_per_axis == other.points_per_axis
            && self.half_width == other.half_width
    }
}

fn level_count_for(t_min: f64, t_max: f64) -> usize {
    ((t_max / t_min).ln() / DEFAULT_LOG_STEP).ceil() as usize + 1
}

/// Real samples of a function on the spatial box of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(FraxError::Shape(format!(
                "{} values for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("non-finite value at position {i}")));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction {
            values: vec![0.0; spec.len()],
            spec,
        }
    }

    /// Samples `f` at every grid point; `f` receives the first n coordinates.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..spec.len())
            .map(|i| f(&spec.point(i)[..spec.n]))
            .collect();
        GridFunction::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Replaces the time range carried by the spec; values are untouched.
    pub fn with_spec(mut self, spec: GridSpec) -> Result<Self> {
        if !spec.same_box(&self.spec) {
            return Err(FraxError::Shape("new spec describes a different box".into()));
        }
        spec.validate()?;
        self.spec = spec;
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::new(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// h^n Σ f.
    pub fn integral(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Projection onto mean-zero functions (subtracts the grid mean).
    pub fn mean_zero(&self) -> Self {
        let m = self.mean();
        GridFunction {
            spec: self.spec,
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    /// Periodic shift by whole grid cells: result(x) = f(x - shift·h).
    pub fn lattice_shift(&self, shift: &[i64]) -> Self {
        let big_n = self.spec.points_per_axis as i64;
        let mut out = vec![0.0; self.values.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let idx = self.spec.multi_index(flat);
            let mut src = [0usize; 3];
            for d in 0..self.spec.n {
                let s = shift.get(d).copied().unwrap_or(0);
                src[d] = (idx[d] as i64 - s).rem_euclid(big_n) as usize;
            }
            *o = self.values[self.spec.flat_index(&src[..self.spec.n])];
        }
        GridFunction {
            spec: self.spec,
            values: out,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete Fourier coefficients `h^n Σ_x e^{-i x·ξ} f(x)`.
    pub fn transform(&self) -> SpectralFunction {
        transform(self)
    }
}

/// Fourier coefficients on the frequency lattice ξ = πk/L, stored in FFT
/// order (axis 0 slowest, raw index k in 0..N, see [`GridSpec::signed_index`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        spec.validate()?;
        if coeffs.len() != spec.len() {
            return Err(FraxError::Shape(format!(
                "{} coefficients for a grid of {} modes",
                coeffs.len(),
                spec.len()
            )));
        }
        Ok(SpectralFunction { spec, coeffs })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at the zero frequency.
    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// (2π)^(-n) Σ w(|ξ|) |f̂(ξ)|² Δξ^n over every mode.
    pub fn weighted_power(&self, w: impl Fn(f64) -> f64) -> f64 {
        let spec = &self.spec;
        let dxi = spec.frequency_step();
        let scale = (dxi / (2.0 * std::f64::consts::PI)).powi(spec.n as i32);
        let total: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| w(spec.frequency_norm(i)) * c.norm_sqr())
            .sum();
        scale * total
    }

    pub fn inverse_transform(&self) -> GridFunction {
        inverse_transform(self)
    }
}

/// Forward transform with the `e^{-i x·ξ}` convention, scaled by h^n.
///
/// The output of a real input is made exactly conjugate-symmetric.
pub fn transform(f: &GridFunction) -> SpectralFunction {
    let spec = f.spec;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, &spec, false);
    let vol = spec.cell_volume();
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= vol * phase_sign(&spec, i);
    }
    let mut sym = buf.clone();
    for (i, c) in sym.iter_mut().enumerate() {
        let m = buf[spec.mirror_index(i)].conj();
        *c = (buf[i] + m) * 0.5;
    }
    SpectralFunction { spec, coeffs: sym }
}

/// Exact discrete inverse of [`transform`]; the real part is returned.
pub fn inverse_transform(f: &SpectralFunction) -> GridFunction {
    let spec = f.spec;
    GridFunction {
        spec,
        values: inverse_to_real(&spec, f.coeffs.clone()),
    }
}

/// Inverse transform of coefficients already in FFT order, real part only.
pub(crate) fn inverse_to_real(spec: &GridSpec, mut buf: Vec<Complex64>) -> Vec<f64> {
    let scale = 1.0 / (spec.cell_volume() * spec.len() as f64);
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= scale * phase_sign(spec, i);
    }
    fft_nd(&mut buf, spec, true);
    buf.into_iter().map(|c| c.re).collect()
}

/// (-1)^(Σ k_d): the factor e^{iξ·L} carried by a box starting at -L.
fn phase_sign(spec: &GridSpec, flat: usize) -> f64 {
    let idx = spec.multi_index(flat);
    let parity: usize = idx[..spec.n].iter().sum();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized n-dimensional FFT, axis by axis.
fn fft_nd(buf: &mut [Complex64], spec: &GridSpec, inverse: bool) {
    let big_n = spec.points_per_axis;
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(big_n)
    } else {
        planner.plan_fft_forward(big_n)
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); big_n];
    for axis in 0..spec.n {
        let stride = big_n.pow((spec.n - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(buf, &mut scratch);
            continue;
        }
        let block = big_n * stride;
        for outer in (0..buf.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = buf[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    buf[base + k * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_are_geometric_and_hit_the_ends() {
        let spec = GridSpec::new(1, 10.0, 64)
            .unwrap()
            .with_t_range(0.01, 100.0, 5)
            .unwrap();
        let t = spec.t_levels();
        assert_eq!(t[0], 0.01);
        assert_eq!(t[4], 100.0);
        for w in t.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(1, 10.0, 48).is_err());
        assert!(GridSpec::new(4, 10.0, 64).is_err());
        assert!(GridSpec::new(1, -1.0, 64).is_err());
        let spec = GridSpec::new(2, 5.0, 16).unwrap();
        assert!(spec.with_t_range(1.0, 0.5, 10).is_err());
        assert!(GridFunction::new(spec, vec![0.0; 3]).is_err());
        assert!(GridFunction::new(spec, vec![f64::NAN; 256]).is_err());
    }

    #[test]
    fn index_round_trip_and_mirror() {
        let spec = GridSpec::new(3, 1.0, 8).unwrap();
        for flat in 0..spec.len() {
            let idx = spec.multi_index(flat);
            assert_eq!(spec.flat_index(&idx), flat);
            let m = spec.mirror_index(flat);
            assert_eq!(spec.mirror_index(m), flat);
        }
        assert_eq!(spec.signed_index(4), -4);
        assert_eq!(spec.signed_index(3), 3);
    }

    #[test]
    fn single_mode_lands_on_its_frequency() {
        let spec = GridSpec::new(1, std::f64::consts::PI, 32).unwrap();
        let f = GridFunction::from_fn(spec, |x| (3.0 * x[0]).cos()).unwrap();
        let fh = f.transform();
        for (i, c) in fh.coeffs().iter().enumerate() {
            let k = spec.signed_index(i);
            let expect = if k.abs() == 3 { std::f64::consts::PI } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-12 && c.im.abs() < 1e-12, "k={k} c={c}");
        }
    }
}
