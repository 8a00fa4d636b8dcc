use serde::{Deserialize, Serialize};

use crate::error::{domain, FraxError, Result};
use crate::functionals::{DiscreteMeasure, SphereGrid};

/// Boundary samples per tent test on a ball union are `TENT_SAMPLE_FACTOR · 3^n`.
pub const TENT_SAMPLE_FACTOR: usize = 10;

/// Closed ball B(center, radius) in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = Ball { center, radius };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.center.len()) {
            return Err(domain(format!("ball center has {} coordinates", self.center.len())));
        }
        if self.center.iter().any(|v| !v.is_finite()) {
            return Err(domain("ball center is not finite"));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(domain(format!("ball radius {} must be positive", self.radius)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains_point(&self, y: &[f64]) -> bool {
        distance(&self.center, y) <= self.radius
    }

    /// B(x, t) ⊆ self, i.e. |x - center| ≤ radius - t.
    pub fn contains_ball(&self, x: &[f64], t: f64) -> bool {
        distance(&self.center, x) <= self.radius - t
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    SingleBall,
    BallUnion,
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetComponent {
    Ball(Ball),
    Box(BoxBounds),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpenSet {
    kind: SetKind,
    components: Vec<SetComponent>,
}

/// A finite union of balls, a single ball, or a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOpenSet")]
pub struct OpenSet {
    kind: SetKind,
    components: Vec<SetComponent>,
}

impl TryFrom<RawOpenSet> for OpenSet {
    type Error = FraxError;

    fn try_from(raw: RawOpenSet) -> Result<Self> {
        let set = OpenSet {
            kind: raw.kind,
            components: raw.components,
        };
        set.validate()?;
        Ok(set)
    }
}

impl OpenSet {
    pub fn ball(ball: Ball) -> Result<Self> {
        ball.validate()?;
        Ok(OpenSet {
            kind: SetKind::SingleBall,
            components: vec![SetComponent::Ball(ball)],
        })
    }

    pub fn union(balls: Vec<Ball>) -> Result<Self> {
        let set = OpenSet {
            kind: SetKind::BallUnion,
            components: balls.into_iter().map(SetComponent::Ball).collect(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn cube_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let set = OpenSet {
            kind: SetKind::Box,
            components: vec![SetComponent::Box(BoxBounds { lower, upper })],
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(domain("open set has no components"));
        }
        let n = self.dim();
        for c in &self.components {
            match (self.kind, c) {
                (SetKind::Box, SetComponent::Box(b)) => {
                    if b.lower.len() != n || b.upper.len() != n || !(1..=3).contains(&n) {
                        return Err(FraxError::Shape("box bounds have inconsistent lengths".into()));
                    }
                    if b.lower.iter().zip(&b.upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
                        return Err(domain("box needs lower < upper on every axis"));
                    }
                }
                (SetKind::SingleBall | SetKind::BallUnion, SetComponent::Ball(b)) => {
                    b.validate()?;
                    if b.dim() != n {
                        return Err(FraxError::Shape("balls of different dimensions".into()));
                    }
                }
                _ => return Err(domain(format!("component does not match kind {:?}", self.kind))),
            }
        }
        if self.kind != SetKind::BallUnion && self.components.len() != 1 {
            return Err(domain(format!("{:?} takes exactly one component", self.kind)));
        }
        Ok(())
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn components(&self) -> &[SetComponent] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        match &self.components[0] {
            SetComponent::Ball(b) => b.dim(),
            SetComponent::Box(b) => b.lower.len(),
        }
    }

    pub fn balls(&self) -> impl Iterator<Item = &Ball> {
        self.components.iter().filter_map(|c| match c {
            SetComponent::Ball(b) => Some(b),
            SetComponent::Box(_) => None,
        })
    }

    /// Tent membership is approximate only for ball unions in n ≥ 2.
    pub fn tent_is_exact(&self) -> bool {
        self.kind != SetKind::BallUnion || self.dim() == 1
    }

    /// Closed membership of a point.
    pub fn contains_point(&self, y: &[f64]) -> bool {
        self.components.iter().any(|c| match c {
            SetComponent::Ball(b) => b.contains_point(y),
            SetComponent::Box(b) => y
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u),
        })
    }

    /// Smallest axis-aligned box containing the set.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for c in &self.components {
            for d in 0..n {
                let (l, u) = match c {
                    SetComponent::Ball(b) => (b.center[d] - b.radius, b.center[d] + b.radius),
                    SetComponent::Box(b) => (b.lower[d], b.upper[d]),
                };
                lo[d] = lo[d].min(l);
                hi[d] = hi[d].max(u);
            }
        }
        (lo, hi)
    }

    /// A ball containing the whole set: the set itself for a single ball,
    /// otherwise centered at the bounding-box center.
    pub fn enclosing_ball(&self) -> Ball {
        if let (SetKind::SingleBall, SetComponent::Ball(b)) = (self.kind, &self.components[0]) {
            return b.clone();
        }
        let (lo, hi) = self.bounding_box();
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(l, u)| 0.5 * (l + u)).collect();
        let radius = self
            .components
            .iter()
            .map(|c| match c {
                SetComponent::Ball(b) => distance(&center, &b.center) + b.radius,
                SetComponent::Box(b) => {
                    let far: Vec<f64> = (0..center.len())
                        .map(|d| (b.lower[d] - center[d]).abs().max((b.upper[d] - center[d]).abs()))
                        .collect();
                    norm(&far)
                }
            })
            .fold(0.0, f64::max);
        Ball { center, radius }
    }

    /// Whether the open cube `lo + (0, side)^n` meets the set.
    pub fn meets_cube(&self, lo: &[f64], side: f64) -> bool {
        self.components.iter().any(|c| match c {
            SetComponent::Ball(b) => {
                let gap: Vec<f64> = (0..lo.len())
                    .map(|d| (lo[d] - b.center[d]).max(b.center[d] - lo[d] - side).max(0.0))
                    .collect();
                norm(&gap) < b.radius
            }
            SetComponent::Box(b) => (0..lo.len()).all(|d| lo[d] < b.upper[d] && b.lower[d] < lo[d] + side),
        })
    }

    /// Whether a single component contains the closed cube `lo + [0, side]^n`.
    pub fn covers_cube(&self, lo: &[f64], side: f64) -> bool {
        self.components.iter().any(|c| match c {
            SetComponent::Ball(b) => {
                let far: Vec<f64> = (0..lo.len())
                    .map(|d| (lo[d] - b.center[d]).abs().max((lo[d] + side - b.center[d]).abs()))
                    .collect();
                norm(&far) <= b.radius
            }
            SetComponent::Box(b) => (0..lo.len()).all(|d| b.lower[d] <= lo[d] && lo[d] + side <= b.upper[d]),
        })
    }

    /// `B(x, t) ⊆ O`: closed form for balls and boxes; for ball unions, exact
    /// interval arithmetic in n = 1 and sampling with the default count above.
    pub fn tent_contains(&self, x: &[f64], t: f64) -> bool {
        self.tent_contains_with(x, t, TENT_SAMPLE_FACTOR * 3usize.pow(self.dim() as u32))
    }

    /// [`OpenSet::tent_contains`] with `samples` directions per sphere for ball unions.
    pub fn tent_contains_with(&self, x: &[f64], t: f64, samples: usize) -> bool {
        if !(t > 0.0) || x.len() != self.dim() {
            return false;
        }
        match self.kind {
            SetKind::SingleBall | SetKind::BallUnion if self.balls().any(|b| b.contains_ball(x, t)) => true,
            SetKind::SingleBall => false,
            SetKind::Box => match &self.components[0] {
                SetComponent::Box(b) => (0..x.len()).all(|d| b.lower[d] + t <= x[d] && x[d] <= b.upper[d] - t),
                SetComponent::Ball(_) => unreachable!("validated"),
            },
            SetKind::BallUnion if x.len() == 1 => self.interval_covers(x[0] - t, x[0] + t),
            SetKind::BallUnion => self.sampled_tent(x, t, samples),
        }
    }

    fn interval_covers(&self, a: f64, b: f64) -> bool {
        let mut spans: Vec<(f64, f64)> = self
            .balls()
            .map(|ball| (ball.center[0] - ball.radius, ball.center[0] + ball.radius))
            .collect();
        spans.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut reach = a;
        for (lo, hi) in spans {
            if lo > reach {
                break;
            }
            reach = reach.max(hi);
            if reach >= b {
                return true;
            }
        }
        false
    }

    fn sampled_tent(&self, x: &[f64], t: f64, samples: usize) -> bool {
        if !self.contains_point(x) {
            return false;
        }
        let Ok(sphere) = SphereGrid::new(x.len(), samples.max(4)) else {
            return false;
        };
        let mut y = vec![0.0; x.len()];
        for shell in [1.0, 2.0 / 3.0, 1.0 / 3.0] {
            for k in 0..sphere.len() {
                for (d, v) in y.iter_mut().enumerate() {
                    *v = x[d] + shell * t * sphere.direction(k)[d];
                }
                if !self.contains_point(&y) {
                    return false;
                }
            }
        }
        true
    }
}

/// μ(T(O)): total mass of the atoms (x, t, w) with B(x, t) ⊆ O.
pub fn tent_measure(mu: &DiscreteMeasure, set: &OpenSet) -> f64 {
    mu.atoms()
        .iter()
        .filter(|a| set.tent_contains(&a.x, a.t))
        .map(|a| a.w)
        .sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Atom;

    fn unit_ball() -> OpenSet {
        OpenSet::ball(Ball::new(vec![0.0], 1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_ball_tent() {
        let o = unit_ball();
        assert!(o.tent_contains(&[0.0], 0.5));
        assert!(!o.tent_contains(&[0.6], 0.5));
        assert!(o.tent_contains(&[0.5], 0.5));
    }

    #[test]
    fn box_tent_uses_axis_margins() {
        let o = OpenSet::cube_box(vec![0.0, 0.0], vec![4.0, 2.0]).unwrap();
        assert!(o.tent_contains(&[2.0, 1.0], 1.0));
        assert!(!o.tent_contains(&[2.0, 1.0], 1.01));
        assert!(!o.tent_contains(&[0.5, 1.0], 0.6));
    }

    #[test]
    fn interval_union_sees_gaps() {
        let o = OpenSet::union(vec![
            Ball::new(vec![-3.0], 1.0).unwrap(),
            Ball::new(vec![3.0], 1.0).unwrap(),
        ])
        .unwrap();
        assert!(!o.tent_contains(&[0.0], 3.5));
        assert!(o.tent_contains(&[3.0], 0.9));
    }

    #[test]
    fn planar_union_of_overlapping_discs() {
        let o = OpenSet::union(vec![
            Ball::new(vec![-0.5, 0.0], 1.0).unwrap(),
            Ball::new(vec![0.5, 0.0], 1.0).unwrap(),
        ])
        .unwrap();
        assert!(!o.tent_is_exact());
        // The lens between the centers covers a disc of radius ~0.6 at the origin.
        assert!(o.tent_contains(&[0.0, 0.0], 0.6));
        assert!(!o.tent_contains(&[0.0, 0.0], 0.95));
    }

    #[test]
    fn tent_measure_counts_contained_atoms() {
        let mu = DiscreteMeasure::new(
            1,
            vec![
                Atom { x: vec![0.0], t: 0.5, w: 3.0 },
                Atom { x: vec![0.0], t: 2.0, w: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(tent_measure(&mu, &unit_ball()), 3.0);
    }

    #[test]
    fn open_set_json_is_strict() {
        let o: OpenSet =
            serde_json::from_str(r#"{"kind":"ball-union","components":[{"center":[0.0],"radius":1.0}]}"#).unwrap();
        assert_eq!(o.kind(), SetKind::BallUnion);
        assert!(serde_json::from_str::<OpenSet>(r#"{"kind":"box","components":[{"center":[0.0],"radius":1.0}]}"#).is_err());
        assert!(serde_json::from_str::<OpenSet>(r#"{"kind":"single-ball","components":[],"x":1}"#).is_err());
        assert!(serde_json::from_str::<OpenSet>(r#"{"kind":"single-ball","components":[]}"#).is_err());
    }
}
