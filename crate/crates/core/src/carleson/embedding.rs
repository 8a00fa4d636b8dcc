use rayon::prelude::*;
use serde::Serialize;

use super::conditions::{ball_condition, condition_vi, BallSearch, CapacityCase, CapacityParams, ConditionSup};
use super::geometry::OpenSet;
use crate::error::Result;
use crate::field::catalog::TestFunction;
use crate::field::{Component, ExtensionField, ExtensionPlan, GridFunction, GridSpec};
use crate::functionals::{besov_seminorm, lorentz_norm, nontangential_max, BesovQ, DiscreteMeasure};
use crate::kernel::LaguerreRule;
use crate::params::Params;
use crate::verify::{CheckKind, Report};

/// Outcome of an embedding experiment over a family of boundary data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingOutcome {
    pub report: Report,
    pub names: Vec<String>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub condition: ConditionSup,
}

/// Values of the extension of `f` at the atoms of `mu`.
pub fn extension_at_atoms(f: &GridFunction, prm: &Params, rule: &LaguerreRule, mu: &DiscreteMeasure) -> Result<Vec<f64>> {
    let plan = ExtensionPlan::new(f, prm, rule)?;
    let points: Vec<(&[f64], f64)> = mu.atoms().iter().map(|a| (a.x.as_slice(), a.t)).collect();
    plan.point_values(Component::Value, &points)
}

/// Empirical embedding constant `sup_f ‖u_f‖_{Lorentz(μ)} / ‖f‖_{Besov}` over
/// `catalog`, reported next to the sup of the ball condition for the same
/// exponents.
///
/// In case (1) q is taken equal to p. The ball condition in cases (2) and (3)
/// uses the r^(n-pβ) capacity surrogate.
pub fn embedding_test(
    mu: &DiscreteMeasure,
    prm: &Params,
    catalog: &[TestFunction],
    spec: &GridSpec,
    case: CapacityCase,
    rule: &LaguerreRule,
) -> Result<EmbeddingOutcome> {
    let n = spec.n;
    let mut cp = CapacityParams::from_params(prm);
    if case == CapacityCase::Case1 {
        cp.q = cp.p;
    }
    cp.require(n, case)?;
    let (first, second) = cp.lorentz_indices(case);
    let besov_q = if cp.q.is_finite() { BesovQ::Finite(cp.q) } else { BesovQ::Infinity };

    let rows: Vec<(f64, f64)> = catalog
        .par_iter()
        .map(|tf| {
            let f = tf.sample(spec)?;
            let rhs = besov_seminorm(&f, cp.beta, cp.p, besov_q)?;
            let lhs = if mu.is_empty() {
                0.0
            } else {
                let u = extension_at_atoms(&f, prm, rule, mu)?;
                let pairs: Vec<(f64, f64)> = u.into_iter().zip(mu.atoms().iter().map(|a| a.w)).collect();
                lorentz_norm(&pairs, first, second)?
            };
            Ok((lhs, rhs))
        })
        .collect::<Result<_>>()?;

    let condition = match case {
        CapacityCase::Case1 => condition_vi(mu, &cp, &BallSearch::default())?,
        _ => ball_condition(mu, cp.mass_power(case), cp.exponent(n), &BallSearch::default())?,
    };

    let ratios: Vec<f64> = rows.iter().map(|(l, r)| if *r > 0.0 { l / r } else { f64::INFINITY }).collect();
    let best = ratios
        .iter()
        .enumerate()
        .fold(None::<usize>, |acc, (i, r)| match acc {
            Some(j) if ratios[j] >= *r => Some(j),
            _ => Some(i),
        });
    let (lhs, rhs) = best.map_or((0.0, 0.0), |i| rows[i]);
    let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
    let mut report = Report::new(
        format!("embedding-{}", case.as_str()),
        CheckKind::Empirical,
        *prm,
        lhs,
        rhs,
        0.0,
    )
    .extra("condition_sup", condition.value)
    .extra("functions", catalog.len() as f64)
    .extra("atoms", mu.len() as f64)
    .extra("ratio_min", finite.iter().copied().fold(f64::INFINITY, f64::min))
    .extra("ratio_max", finite.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    .note("empirical: sup of lhs/rhs over the supplied functions");
    if case != CapacityCase::Case1 {
        report = report.note("ball condition uses the r^(n-p*beta) capacity surrogate");
    }
    if let (Some(a), Some(b)) = (ratios.first(), ratios.last()) {
        if *a > 0.0 && a.is_finite() && b.is_finite() {
            report = report.extra("ratio_last_over_first", b / a);
        }
    }
    if let Some(i) = best {
        report = report.note(format!("attained by {}", catalog[i].name));
    }
    Ok(EmbeddingOutcome {
        report,
        names: catalog.iter().map(|t| t.name.clone()).collect(),
        lhs: rows.iter().map(|r| r.0).collect(),
        rhs: rows.iter().map(|r| r.1).collect(),
        ratios,
        condition,
    })
}

/// Grid check of E_λ ⊆ T(O_λ), where E_λ = {(x, t_j) : |u| > λ} and
/// O_λ = {x : N u(x) > λ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TentInclusion {
    /// Grid points of E_λ.
    pub counted: usize,
    /// Points of E_λ whose ball B(x, t_j) reaches a grid point outside O_λ.
    pub violations: usize,
}

/// Checks E_λ ⊆ T(O_λ) on the grid, with the same periodic distances and
/// open balls as the nontangential maximal function.
pub fn grid_tent_inclusion(u: &ExtensionField, lambda: f64) -> TentInclusion {
    let spec = *u.spec();
    let nmax = nontangential_max(u);
    let outside: Vec<usize> = (0..spec.len()).filter(|&i| !(nmax.values()[i] > lambda)).collect();
    let big_n = spec.points_per_axis as i64;
    let wrap = |a: usize, b: usize| {
        let mut d = (a as i64 - b as i64).rem_euclid(big_n);
        if d >= big_n / 2 {
            d -= big_n;
        }
        d * d
    };
    // Squared grid distance from each point to the complement of O_λ.
    let gap: Vec<Option<i64>> = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let xi = spec.multi_index(x);
            outside
                .iter()
                .map(|&z| {
                    let zi = spec.multi_index(z);
                    (0..spec.n).map(|d| wrap(xi[d], zi[d])).sum::<i64>()
                })
                .min()
        })
        .collect();
    let h = spec.spacing();
    let mut out = TentInclusion { counted: 0, violations: 0 };
    for (j, &t) in u.t_levels().iter().enumerate() {
        let reach = t / h;
        for (x, v) in u.level(j).iter().enumerate() {
            if v.abs() > lambda {
                out.counted += 1;
                if let Some(g) = gap[x] {
                    if g == 0 || (g as f64) < reach * reach {
                        out.violations += 1;
                    }
                }
            }
        }
    }
    out
}

/// Minimum of u over the grid points (x, t_j) of the tent T(O), or `None`
/// when the tent holds no grid point.
pub fn tent_lower_bound(u: &ExtensionField, set: &OpenSet) -> Option<f64> {
    let spec = *u.spec();
    let mut best: Option<f64> = None;
    for (j, &t) in u.t_levels().iter().enumerate() {
        let level = u.level(j);
        for (i, v) in level.iter().enumerate() {
            let x = spec.point(i);
            if set.tent_contains(&x[..spec.n], t) {
                best = Some(best.map_or(*v, |b: f64| b.min(*v)));
            }
        }
    }
    best
}
