use serde::Serialize;

use super::geometry::OpenSet;
use crate::error::{domain, Result};

/// Deepest dyadic refinement used by [`hausdorff_content`].
pub const MAX_DEPTH: usize = 12;

/// Budget for dimension 3, where boundary cubes grow like 4^depth.
const MAX_DEPTH_3D: usize = 7;

/// Covering estimate of H^∞_d(E).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentEstimate {
    pub value: f64,
    pub dimension: f64,
    /// Estimate allowed to refine only to depth k, for k = 0..=depth.
    pub by_depth: Vec<f64>,
}

/// Dyadic bin i of a radius: r ∈ (2^(-i-1), 2^(-i)]. Negative i for r > 1.
pub fn radius_bin(r: f64) -> i32 {
    let mut i = (-r.log2()).floor() as i32;
    while 2f64.powi(-i) < r {
        i -= 1;
    }
    while r <= 2f64.powi(-i - 1) {
        i += 1;
    }
    i
}

/// The covering cost 2^(-d i) of one ball of radius r.
pub fn ball_cost(r: f64, d: f64) -> f64 {
    2f64.powf(-d * radius_bin(r) as f64)
}

/// Upper estimate of the Hausdorff content H^∞_d(E) from dyadic covers.
///
/// The bounding cube of E is refined dyadically; each cube is covered either
/// by its circumscribed ball or by the covers of its children meeting E,
/// whichever is cheaper. Cubes inside a component are never refined, since
/// for d ≤ n splitting them cannot lower the cost. One enclosing ball of E is
/// also a candidate.
pub fn hausdorff_content(set: &OpenSet, d: f64) -> Result<ContentEstimate> {
    let depth = if set.dim() == 3 { MAX_DEPTH_3D } else { MAX_DEPTH };
    hausdorff_content_with(set, d, depth)
}

pub fn hausdorff_content_with(set: &OpenSet, d: f64, max_depth: usize) -> Result<ContentEstimate> {
    let n = set.dim();
    if !(d > 0.0 && d <= n as f64) {
        return Err(domain(format!("content dimension d = {d} not in (0, {n}]")));
    }
    let (lo, hi) = set.bounding_box();
    let side = lo.iter().zip(&hi).map(|(l, u)| u - l).fold(0.0, f64::max);
    let walker = Walker {
        set,
        d,
        half_diagonal: (n as f64).sqrt() / 2.0,
        max_depth,
    };
    let tree = walker.cost(&lo, side, 0);
    let single = ball_cost(set.enclosing_ball().radius, d);
    let by_depth: Vec<f64> = tree.iter().map(|c| c.min(single)).collect();
    Ok(ContentEstimate {
        value: *by_depth.last().expect("depth 0 is always present"),
        dimension: d,
        by_depth,
    })
}

/// Hausdorff-content surrogate of the p = q Besov capacity of B(x, r): r^(n - pβ).
pub fn ball_capacity_surrogate(n: usize, r: f64, p: f64, beta: f64) -> Result<f64> {
    let e = n as f64 - p * beta;
    if !(e > 0.0) {
        return Err(domain(format!("degenerate capacity exponent n - p·beta = {e}")));
    }
    if !(r > 0.0) {
        return Err(domain(format!("radius {r} must be positive")));
    }
    Ok(r.powf(e))
}

struct Walker<'a> {
    set: &'a OpenSet,
    d: f64,
    half_diagonal: f64,
    max_depth: usize,
}

impl Walker<'_> {
    /// Costs of covering E ∩ cube when refinement may reach depth k, for
    /// k = depth..=max_depth.
    fn cost(&self, lo: &[f64], side: f64, depth: usize) -> Vec<f64> {
        let levels = self.max_depth - depth + 1;
        if !self.set.meets_cube(lo, side) {
            return vec![0.0; levels];
        }
        let own = ball_cost(side * self.half_diagonal, self.d);
        if depth == self.max_depth || self.set.covers_cube(lo, side) {
            return vec![own; levels];
        }
        let n = lo.len();
        let half = side / 2.0;
        let mut children = vec![0.0; levels - 1];
        let mut corner = vec![0.0; n];
        for mask in 0..(1usize << n) {
            for (a, c) in corner.iter_mut().enumerate() {
                *c = lo[a] + if mask >> a & 1 == 1 { half } else { 0.0 };
            }
            for (acc, c) in children.iter_mut().zip(self.cost(&corner, half, depth + 1)) {
                *acc += c;
            }
        }
        let mut out = Vec::with_capacity(levels);
        out.push(own);
        out.extend(children.into_iter().map(|c| c.min(own)));
        out
    }
}
