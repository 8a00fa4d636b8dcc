use crate::error::{domain, Result};

/// Lorentz exponent p of [`lorentz_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LorentzP {
    Finite(f64),
    Infinity,
}

/// ‖g‖_{L^{q,p}(μ)} for g taking value `v_i` on an atom of mass `m_i`.
///
/// With |v| sorted decreasingly and cumulative masses M_k, the distribution
/// function is a step function and
/// `‖g‖^p = Σ_k M_k^(p/q) (v_k^p - v_(k+1)^p)`; for p = ∞ the norm is
/// `max_k v_k M_k^(1/q)`.
pub fn lorentz_norm(values: &[(f64, f64)], q: f64, p: LorentzP) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(domain(format!("Lorentz exponent q = {q} must be positive")));
    }
    if let LorentzP::Finite(pv) = p {
        if !(pv > 0.0) || !pv.is_finite() {
            return Err(domain(format!("Lorentz exponent p = {pv} must be positive")));
        }
    }
    for &(v, m) in values {
        if !v.is_finite() || !(m >= 0.0) || !m.is_finite() {
            return Err(domain(format!("invalid atom ({v}, {m})")));
        }
    }
    let mut sorted: Vec<(f64, f64)> = values.iter().map(|&(v, m)| (v.abs(), m)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut cumulative = 0.0;
    match p {
        LorentzP::Infinity => {
            let mut best: f64 = 0.0;
            for &(v, m) in &sorted {
                cumulative += m;
                best = best.max(v * cumulative.powf(1.0 / q));
            }
            Ok(best)
        }
        LorentzP::Finite(pv) => {
            let mut sum = 0.0;
            for (k, &(v, m)) in sorted.iter().enumerate() {
                cumulative += m;
                let next = sorted.get(k + 1).map_or(0.0, |a| a.0);
                sum += cumulative.powf(pv / q) * (v.powf(pv) - next.powf(pv));
            }
            Ok(sum.powf(1.0 / pv))
        }
    }
}
