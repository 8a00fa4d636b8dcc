use rayon::prelude::*;

use crate::field::{ExtensionField, GridFunction, GridSpec};

/// Minimum-image offsets (in grid units) and their squared lengths.
fn offsets(spec: &GridSpec) -> Vec<([i64; 3], i64)> {
    let big_n = spec.points_per_axis as i64;
    (0..spec.len())
        .map(|flat| {
            let idx = spec.multi_index(flat);
            let mut m = [0i64; 3];
            let mut r2 = 0;
            for d in 0..spec.n {
                let k = idx[d] as i64;
                m[d] = if k < big_n / 2 { k } else { k - big_n };
                r2 += m[d] * m[d];
            }
            (m, r2)
        })
        .collect()
}

fn shifted(spec: &GridSpec, flat: usize, off: &[i64; 3]) -> usize {
    let big_n = spec.points_per_axis as i64;
    let idx = spec.multi_index(flat);
    let mut out = [0usize; 3];
    for d in 0..spec.n {
        out[d] = (idx[d] as i64 + off[d]).rem_euclid(big_n) as usize;
    }
    spec.flat_index(&out[..spec.n])
}

/// Dyadic radii h, 2h, 4h, … up to L used by [`maximal_function`].
pub fn maximal_radii(spec: &GridSpec) -> Vec<f64> {
    let h = spec.spacing();
    let mut r = Vec::new();
    let mut k = 0;
    while h * 2f64.powi(k) <= spec.half_width * (1.0 + 1e-12) {
        r.push(h * 2f64.powi(k));
        k += 1;
    }
    r
}

/// `sup_r r^(-n) h^n Σ_{|y-x| ≤ r} |f(y)|` over r ∈ {h, 2h, 4h, …, L}, with
/// periodic distances. The normalization is r^(-n), not the ball volume.
pub fn maximal_function(f: &GridFunction) -> GridFunction {
    let spec = *f.spec();
    let radii = maximal_radii(&spec);
    let offs = offsets(&spec);
    // Bin of each offset: smallest k with |m|² ≤ 4^k, or none.
    let bins: Vec<Option<usize>> = offs
        .iter()
        .map(|&(_, r2)| (0..radii.len()).find(|&k| r2 <= 1i64 << (2 * k)))
        .collect();
    let vol = spec.cell_volume();
    let n = spec.n as i32;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let mut per_bin = vec![0.0; radii.len()];
            for (o, b) in offs.iter().zip(&bins) {
                if let Some(b) = b {
                    per_bin[*b] += abs[shifted(&spec, x, &o.0)];
                }
            }
            let mut acc = 0.0;
            let mut best: f64 = 0.0;
            for (k, s) in per_bin.iter().enumerate() {
                acc += s;
                best = best.max(vol * acc / radii[k].powi(n));
            }
            best
        })
        .collect();
    GridFunction::new(spec, values).expect("finite input gives finite output")
}

/// `N(x) = max { |u(y, t_j)| : |y - x| < t_j }` over grid points and levels,
/// with periodic distances; the vertical ray y = x is always included.
pub fn nontangential_max(u: &ExtensionField) -> GridFunction {
    let spec = *u.spec();
    let h = spec.spacing();
    let offs = offsets(&spec);
    let max_r2 = offs.iter().map(|o| o.1).max().unwrap_or(0);
    let mut out = vec![0.0f64; spec.len()];
    for (j, &t) in u.t_levels().iter().enumerate() {
        let level = u.level(j);
        let reach = t / h;
        let within: Vec<&([i64; 3], i64)> = offs
            .iter()
            .filter(|o| o.1 == 0 || (o.1 as f64) < reach * reach)
            .collect();
        if within.len() == offs.len() || (max_r2 as f64) < reach * reach {
            let m = level.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            out.iter_mut().for_each(|o| *o = o.max(m));
            continue;
        }
        let level_max: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|x| {
                within
                    .iter()
                    .map(|o| level[shifted(&spec, x, &o.0)].abs())
                    .fold(0.0f64, f64::max)
            })
            .collect();
        for (o, m) in out.iter_mut().zip(level_max) {
            *o = o.max(m);
        }
    }
    GridFunction::new(spec, out).expect("finite input gives finite output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_stop_at_half_width() {
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let r = maximal_radii(&spec);
        assert_eq!(r.first(), Some(&0.25));
        assert_eq!(r.last(), Some(&8.0));
    }

    #[test]
    fn spike_gives_inverse_power_profile() {
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let mut v = vec![0.0; 64];
        v[32] = 4.0;
        let f = GridFunction::new(spec, v).unwrap();
        let m = maximal_function(&f);
        let h = spec.spacing();
        assert!((m.values()[32] - 4.0).abs() < 1e-12);
        // Offset 3h is first captured by the radius 4h.
        assert!((m.values()[35] - 4.0 * h / (4.0 * h)).abs() < 1e-12);
    }
}
