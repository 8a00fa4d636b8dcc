use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{distance, tent_measure, Ball, OpenSet};
use super::hausdorff::hausdorff_content;
use crate::error::{domain, Result};
use crate::functionals::{DiscreteMeasure, LorentzP};
use crate::params::Params;

/// Which of the three exponent regimes a parameter set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityCase {
    /// p = q in (n/(n+β), 1].
    Case1,
    /// (p, q) in (1, n/β) × (1, ∞).
    Case2,
    /// (p, q) in (1, n/β) × {∞}.
    Case3,
}

impl CapacityCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            CapacityCase::Case1 => "case1",
            CapacityCase::Case2 => "case2",
            CapacityCase::Case3 => "case3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "case1" => Ok(CapacityCase::Case1),
            "case2" => Ok(CapacityCase::Case2),
            "case3" => Ok(CapacityCase::Case3),
            _ => Err(domain(format!("unknown case '{s}' (expected case1, case2 or case3)"))),
        }
    }
}

/// Exponents of a capacity/embedding problem; `q = ∞` is `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityParams {
    pub p: f64,
    pub q: f64,
    pub q0: f64,
    pub beta: f64,
}

impl CapacityParams {
    pub fn new(p: f64, q: f64, q0: f64, beta: f64) -> Self {
        CapacityParams { p, q, q0, beta }
    }

    /// Case (1) parameters, where q equals p.
    pub fn diagonal(p: f64, q0: f64, beta: f64) -> Self {
        CapacityParams { p, q: p, q0, beta }
    }

    pub fn from_params(prm: &Params) -> Self {
        CapacityParams::new(prm.p, prm.q, prm.q0, prm.beta)
    }

    /// The capacity scale exponent n − pβ.
    pub fn exponent(&self, n: usize) -> f64 {
        n as f64 - self.p * self.beta
    }

    /// The regime containing these exponents, or an error naming the violated window.
    pub fn classify(&self, n: usize) -> Result<CapacityCase> {
        let nf = n as f64;
        let CapacityParams { p, q, q0, beta } = *self;
        if !(beta > 0.0 && beta < nf) {
            return Err(domain(format!("beta = {beta} not in (0, n = {n})")));
        }
        if p <= 1.0 {
            if q != p {
                return Err(domain(format!("p = {p} <= 1 requires q = p, got q = {q}")));
            }
            if !(p > nf / (nf + beta)) {
                return Err(domain(format!("p = {p} not above n/(n+beta) = {}", nf / (nf + beta))));
            }
            if p < 1.0 && beta >= 1.0 {
                return Err(domain(format!("p = {p} < 1 requires beta < 1, got {beta}")));
            }
            if !(q0 >= p && q0.is_finite()) {
                return Err(domain(format!("q0 = {q0} not in [p, ∞)")));
            }
            return Ok(CapacityCase::Case1);
        }
        if !(p < nf / beta) {
            return Err(domain(format!("p = {p} not below n/beta = {}", nf / beta)));
        }
        if q == f64::INFINITY {
            if !(beta < 1.0) {
                return Err(domain(format!("q = ∞ requires beta < 1, got {beta}")));
            }
            if !(q0 > 0.0 && q0.is_finite()) {
                return Err(domain(format!("q0 = {q0} must be positive and finite")));
            }
            return Ok(CapacityCase::Case3);
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(domain(format!("q = {q} not in (1, ∞]")));
        }
        Ok(CapacityCase::Case2)
    }

    /// Checks that the exponents belong to `case`.
    pub fn require(&self, n: usize, case: CapacityCase) -> Result<()> {
        let got = self.classify(n)?;
        if got != case {
            return Err(domain(format!(
                "exponents (p, q) = ({}, {}) belong to {}, not {}",
                self.p,
                self.q,
                got.as_str(),
                case.as_str()
            )));
        }
        Ok(())
    }

    /// Lorentz indices (first, second) of the embedded norm of u.
    pub fn lorentz_indices(&self, case: CapacityCase) -> (f64, LorentzP) {
        match case {
            CapacityCase::Case1 => (self.q0, LorentzP::Finite(self.p)),
            CapacityCase::Case2 => (self.p.min(self.q), LorentzP::Finite(self.p.max(self.q))),
            CapacityCase::Case3 => (self.q0, LorentzP::Infinity),
        }
    }

    /// Power a with the condition read as μ(T(O))^a ≲ C(O).
    pub fn mass_power(&self, case: CapacityCase) -> f64 {
        match case {
            CapacityCase::Case1 | CapacityCase::Case3 => self.p / self.q0,
            CapacityCase::Case2 => self.p / self.p.min(self.q),
        }
    }
}

/// Finite family of balls scanned by [`condition_vi`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSearch {
    /// Radii t_a (1 + 2^(k/2)) for k in this inclusive range.
    pub k_min: i32,
    pub k_max: i32,
    /// Candidate radii above this are skipped.
    pub max_radius: f64,
    /// Also center balls at midpoints of pairs of atoms.
    pub midpoints: bool,
    pub extra_balls: Vec<Ball>,
}

impl Default for BallSearch {
    fn default() -> Self {
        BallSearch {
            k_min: -8,
            k_max: 24,
            max_radius: f64::INFINITY,
            midpoints: true,
            extra_balls: Vec::new(),
        }
    }
}

impl BallSearch {
    pub fn with_max_radius(mut self, r: f64) -> Self {
        self.max_radius = r;
        self
    }

    pub fn with_balls(mut self, balls: Vec<Ball>) -> Self {
        self.extra_balls = balls;
        self
    }

    /// Candidate centers: atom projections and, optionally, pairwise midpoints,
    /// deduplicated and in lexicographic order.
    pub fn centers(&self, mu: &DiscreteMeasure) -> Vec<Vec<f64>> {
        let xs: Vec<&[f64]> = mu.atoms().iter().map(|a| a.x.as_slice()).collect();
        let mut keys: BTreeSet<Vec<OrdF64>> = BTreeSet::new();
        for (i, a) in xs.iter().enumerate() {
            keys.insert(a.iter().map(|&v| OrdF64(v)).collect());
            if self.midpoints {
                for b in &xs[i + 1..] {
                    keys.insert(a.iter().zip(b.iter()).map(|(u, v)| OrdF64(0.5 * (u + v))).collect());
                }
            }
        }
        keys.into_iter().map(|k| k.into_iter().map(|v| v.0).collect()).collect()
    }

    /// Candidate radii in increasing order.
    pub fn radii(&self, mu: &DiscreteMeasure) -> Vec<f64> {
        let heights: BTreeSet<OrdF64> = mu.atoms().iter().map(|a| OrdF64(a.t)).collect();
        let mut radii: BTreeSet<OrdF64> = BTreeSet::new();
        for t in heights {
            for k in self.k_min..=self.k_max {
                let r = t.0 * (1.0 + 2f64.powf(k as f64 / 2.0));
                if r <= self.max_radius {
                    radii.insert(OrdF64(r));
                }
            }
        }
        radii.into_iter().map(|r| r.0).collect()
    }

    /// Every ball of the search family, for use with set-based checkers.
    pub fn family(&self, mu: &DiscreteMeasure) -> Result<Vec<OpenSet>> {
        let radii = self.radii(mu);
        let mut out = Vec::new();
        for c in self.centers(mu) {
            for &r in &radii {
                out.push(OpenSet::ball(Ball::new(c.clone(), r)?)?);
            }
        }
        for b in &self.extra_balls {
            out.push(OpenSet::ball(b.clone())?);
        }
        Ok(out)
    }
}

/// Total order on finite floats for sorted sets.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Supremum of a ball condition and the ball attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSup {
    pub value: f64,
    pub witness: Option<Ball>,
    /// μ(T(witness)).
    pub witness_mass: f64,
    pub candidates: usize,
}

impl ConditionSup {
    fn empty() -> Self {
        ConditionSup {
            value: 0.0,
            witness: None,
            witness_mass: 0.0,
            candidates: 0,
        }
    }
}

/// `sup μ(T(B(x, r)))^(p/q0) / r^(n - pβ)` over the search family.
///
/// Exponents must be in case (1); q is ignored and taken equal to p.
pub fn condition_vi(mu: &DiscreteMeasure, cp: &CapacityParams, search: &BallSearch) -> Result<ConditionSup> {
    let n = mu.dim();
    let cp = CapacityParams::diagonal(cp.p, cp.q0, cp.beta);
    cp.require(n, CapacityCase::Case1)?;
    ball_condition(mu, cp.mass_power(CapacityCase::Case1), cp.exponent(n), search)
}

/// `sup μ(T(B))^a / r^b` over the search family, with deterministic ties
/// broken towards the smaller (radius, center).
pub fn ball_condition(mu: &DiscreteMeasure, a: f64, b: f64, search: &BallSearch) -> Result<ConditionSup> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(domain(format!("ball condition needs positive exponents, got a = {a}, b = {b}")));
    }
    let n = mu.dim();
    for ball in &search.extra_balls {
        if ball.dim() != n {
            return Err(domain("search ball dimension differs from the measure"));
        }
    }
    if mu.is_empty() {
        return Ok(ConditionSup::empty());
    }
    let radii = search.radii(mu);
    let centers = search.centers(mu);
    let score = |mass: f64, r: f64| if mass > 0.0 { mass.powf(a) / r.powf(b) } else { 0.0 };

    let per_center: Vec<Option<(f64, f64, usize, f64)>> = centers
        .par_iter()
        .enumerate()
        .map(|(ci, c)| {
            let mut reach: Vec<(f64, f64)> = mu
                .atoms()
                .iter()
                .map(|at| (distance(&at.x, c) + at.t, at.w))
                .collect();
            reach.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut prefix = Vec::with_capacity(reach.len());
            let mut acc = 0.0;
            for &(_, w) in &reach {
                acc += w;
                prefix.push(acc);
            }
            let mut best: Option<(f64, f64, usize, f64)> = None;
            for &r in &radii {
                let k = reach.partition_point(|e| e.0 <= r);
                let mass = if k == 0 { 0.0 } else { prefix[k - 1] };
                let v = score(mass, r);
                if best.map_or(true, |bst| v > bst.0) {
                    best = Some((v, r, ci, mass));
                }
            }
            best
        })
        .collect();

    let mut best: Option<(f64, Ball, f64)> = None;
    let mut consider = |v: f64, ball: Ball, mass: f64| {
        let better = match &best {
            None => true,
            Some((bv, bb, _)) => v > *bv || (v == *bv && ball_order(&ball, bb) == Ordering::Less),
        };
        if better {
            best = Some((v, ball, mass));
        }
    };
    for (v, r, ci, mass) in per_center.into_iter().flatten() {
        consider(v, Ball { center: centers[ci].clone(), radius: r }, mass);
    }
    for ball in &search.extra_balls {
        let mass = tent_measure(mu, &OpenSet::ball(ball.clone())?);
        consider(score(mass, ball.radius), ball.clone(), mass);
    }
    let candidates = centers.len() * radii.len() + search.extra_balls.len();
    Ok(match best {
        Some((value, ball, mass)) => ConditionSup {
            value,
            witness: Some(ball),
            witness_mass: mass,
            candidates,
        },
        None => ConditionSup::empty(),
    })
}

fn ball_order(a: &Ball, b: &Ball) -> Ordering {
    a.radius.total_cmp(&b.radius).then_with(|| {
        a.center
            .iter()
            .zip(&b.center)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

/// Supremum over a family of open sets, with the capacity replaced by its
/// Hausdorff-content surrogate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetConditionSup {
    pub value: f64,
    /// Index of the maximizing set in the family.
    pub witness: Option<usize>,
    pub witness_mass: f64,
    pub witness_capacity: f64,
    pub surrogate: bool,
}

/// `sup μ(T(O))^(p/q0) / H^∞_(n-pβ)(O)` over `family`.
pub fn condition_v(mu: &DiscreteMeasure, cp: &CapacityParams, family: &[OpenSet]) -> Result<SetConditionSup> {
    let n = mu.dim();
    let cp = CapacityParams::diagonal(cp.p, cp.q0, cp.beta);
    cp.require(n, CapacityCase::Case1)?;
    let a = cp.mass_power(CapacityCase::Case1);
    let evaluated = evaluate_family(mu, cp.exponent(n), family)?;
    let mut out = SetConditionSup {
        value: 0.0,
        witness: None,
        witness_mass: 0.0,
        witness_capacity: 0.0,
        surrogate: true,
    };
    for (i, (mass, cap)) in evaluated.into_iter().enumerate() {
        let v = if mass > 0.0 { mass.powf(a) / cap } else { 0.0 };
        if out.witness.is_none() || v > out.value {
            out = SetConditionSup {
                value: v,
                witness: Some(i),
                witness_mass: mass,
                witness_capacity: cap,
                surrogate: true,
            };
        }
    }
    Ok(out)
}

/// (μ(T(O)), H^∞_d(O)) for every set of the family.
fn evaluate_family(mu: &DiscreteMeasure, d: f64, family: &[OpenSet]) -> Result<Vec<(f64, f64)>> {
    let n = mu.dim();
    if family.iter().any(|o| o.dim() != n) {
        return Err(domain("open set dimension differs from the measure"));
    }
    family
        .par_iter()
        .map(|o| Ok((tent_measure(mu, o), hausdorff_content(o, d)?.value)))
        .collect()
}

/// Samples of λ ↦ c(μ; λ), the least surrogate capacity among sets whose
/// tent carries mass above λ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizingFunction {
    pub lambdas: Vec<f64>,
    /// +∞ where no set of the family qualifies.
    pub values: Vec<f64>,
}

impl MinimizingFunction {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

pub fn minimizing_function(
    mu: &DiscreteMeasure,
    cp: &CapacityParams,
    lambdas: &[f64],
    family: &[OpenSet],
) -> Result<MinimizingFunction> {
    let n = mu.dim();
    let cp = CapacityParams::diagonal(cp.p, cp.q0, cp.beta);
    cp.require(n, CapacityCase::Case1)?;
    if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) || lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(domain("lambdas must be positive, finite and increasing"));
    }
    let evaluated = evaluate_family(mu, cp.exponent(n), family)?;
    let values = lambdas
        .iter()
        .map(|&l| {
            evaluated
                .iter()
                .filter(|(mass, _)| *mass > l)
                .map(|(_, cap)| *cap)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(MinimizingFunction {
        lambdas: lambdas.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Atom;

    fn one_atom() -> DiscreteMeasure {
        DiscreteMeasure::new(1, vec![Atom { x: vec![0.0], t: 1.0, w: 1.0 }]).unwrap()
    }

    #[test]
    fn classifies_the_three_regimes() {
        assert_eq!(CapacityParams::new(1.0, 1.0, 2.0, 0.5).classify(1).unwrap(), CapacityCase::Case1);
        assert_eq!(CapacityParams::new(1.5, 3.0, 2.0, 0.5).classify(1).unwrap(), CapacityCase::Case2);
        assert_eq!(
            CapacityParams::new(1.5, f64::INFINITY, 2.0, 0.5).classify(1).unwrap(),
            CapacityCase::Case3
        );
        // p below n/(n+β).
        assert!(CapacityParams::new(0.6, 0.6, 2.0, 0.5).classify(1).is_err());
        // p at n/β.
        assert!(CapacityParams::new(2.0, 3.0, 2.0, 0.5).classify(1).is_err());
        // q0 below p in case (1).
        assert!(CapacityParams::new(1.0, 1.0, 0.5, 0.5).classify(1).is_err());
    }

    #[test]
    fn one_atom_condition_peaks_near_the_atom_height() {
        let cp = CapacityParams::diagonal(1.0, 2.0, 0.5);
        let sup = condition_vi(&one_atom(), &cp, &BallSearch::default()).unwrap();
        assert!((sup.value - 1.0).abs() < 0.05, "{}", sup.value);
        let w = sup.witness.unwrap();
        assert!((w.radius - 1.0).abs() < 0.1);
        assert_eq!(sup.witness_mass, 1.0);
    }

    #[test]
    fn empty_measure_gives_zero_without_witness() {
        let cp = CapacityParams::diagonal(1.0, 2.0, 0.5);
        let sup = condition_vi(&DiscreteMeasure::empty(1), &cp, &BallSearch::default()).unwrap();
        assert_eq!(sup.value, 0.0);
        assert!(sup.witness.is_none());
        let v = condition_v(&DiscreteMeasure::empty(1), &cp, &[]).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn minimizing_function_thresholds() {
        let mu = one_atom();
        let cp = CapacityParams::diagonal(1.0, 2.0, 0.5);
        let family: Vec<OpenSet> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| OpenSet::ball(Ball::new(vec![0.0], r).unwrap()).unwrap())
            .collect();
        let m = minimizing_function(&mu, &cp, &[0.25, 0.5, 0.99, 1.5], &family).unwrap();
        assert!((m.values[0] - 1.0).abs() < 1e-12);
        assert_eq!(m.values[3], f64::INFINITY);
        assert!(m.is_nondecreasing());
    }

    #[test]
    fn centers_include_midpoints_once() {
        let mu = DiscreteMeasure::new(
            1,
            vec![
                Atom { x: vec![0.0], t: 1.0, w: 1.0 },
                Atom { x: vec![1.0], t: 1.0, w: 1.0 },
                Atom { x: vec![2.0], t: 1.0, w: 1.0 },
            ],
        )
        .unwrap();
        let c = BallSearch::default().centers(&mu);
        assert_eq!(c, vec![vec![0.0], vec![0.5], vec![1.0], vec![1.5], vec![2.0]]);
    }
}
