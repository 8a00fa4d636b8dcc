use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};

/// Surface measure of the unit sphere S^(n-1) (2 for n = 1).
pub fn sphere_area(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0)
}

/// Volume of the unit ball in dimension k, continued to real k through Γ.
pub fn ball_volume(k: f64) -> f64 {
    PI.powf(k / 2.0) / gamma(1.0 + k / 2.0)
}

/// Equal-weight directions on S^(n-1): ±1 in n = 1, uniform angles in n = 2,
/// a Fibonacci lattice in n = 3.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n: usize,
    points: Vec<[f64; 3]>,
}

impl SphereGrid {
    pub fn new(n: usize, count: usize) -> Result<Self> {
        let points = match n {
            1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            2 => {
                if count < 3 {
                    return Err(domain("need at least 3 directions on the circle"));
                }
                (0..count)
                    .map(|k| {
                        let a = 2.0 * PI * k as f64 / count as f64;
                        [a.cos(), a.sin(), 0.0]
                    })
                    .collect()
            }
            3 => {
                if count < 4 {
                    return Err(domain("need at least 4 directions on the sphere"));
                }
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|k| {
                        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                        let rho = (1.0 - z * z).sqrt();
                        let a = golden * k as f64;
                        [rho * a.cos(), rho * a.sin(), z]
                    })
                    .collect()
            }
            _ => return Err(domain(format!("dimension {n} not supported"))),
        };
        Ok(SphereGrid { n, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.points[k][..self.n]
    }

    /// Quadrature weight of each direction (equal weights summing to |S^(n-1)|).
    pub fn weight(&self) -> f64 {
        sphere_area(self.n) / self.points.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas_and_volumes() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((ball_volume(2.0) - PI).abs() < 1e-14);
        assert!((ball_volume(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_points_are_unit() {
        let g = SphereGrid::new(3, 50).unwrap();
        for k in 0..g.len() {
            let d = g.direction(k);
            let r: f64 = d.iter().map(|v| v * v).sum();
            assert!((r - 1.0).abs() < 1e-14);
        }
    }
}
