use serde::Serialize;

use crate::error::{domain, FraxError, Result};

/// A weighted point mass at (x, t) in the upper half-space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub x: Vec<f64>,
    pub t: f64,
    pub w: f64,
}

/// Finitely many positive atoms in the upper half-space of dimension n + 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    n: usize,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(domain(format!("dimension n = {n} not in 1..=3")));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.x.len() != n {
                return Err(FraxError::Shape(format!(
                    "atom {i} has {} coordinates, expected {n}",
                    a.x.len()
                )));
            }
            if a.x.iter().any(|v| !v.is_finite()) || !a.t.is_finite() || !a.w.is_finite() {
                return Err(domain(format!("atom {i} has non-finite entries")));
            }
            if !(a.t > 0.0) {
                return Err(domain(format!("atom {i} has t = {} (must be > 0)", a.t)));
            }
            if !(a.w > 0.0) {
                return Err(domain(format!("atom {i} has mass {} (must be > 0)", a.w)));
            }
        }
        Ok(DiscreteMeasure { n, atoms })
    }

    pub fn empty(n: usize) -> Self {
        DiscreteMeasure { n, atoms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// Shifts every atom by `shift` in x.
    pub fn translated(&self, shift: &[f64]) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                x: a.x.iter().zip(shift).map(|(x, s)| x + s).collect(),
                ..a.clone()
            })
            .collect();
        DiscreteMeasure { n: self.n, atoms }
    }

    /// Atoms of mass `spacing^n` on the lattice `spacing·Z^n ∩ [-extent, extent]^n`
    /// at height t; approximates Lebesgue measure on the slab {t = height}.
    pub fn slab(n: usize, height: f64, spacing: f64, extent: f64) -> Result<Self> {
        if !(spacing > 0.0 && extent > 0.0) {
            return Err(domain("slab needs positive spacing and extent"));
        }
        let k = (extent / spacing).floor() as i64;
        let side: Vec<f64> = (-k..=k).map(|i| i as f64 * spacing).collect();
        let mut atoms = Vec::new();
        let total = side.len().pow(n as u32);
        for flat in 0..total {
            let mut rem = flat;
            let mut x = vec![0.0; n];
            for d in (0..n).rev() {
                x[d] = side[rem % side.len()];
                rem /= side.len();
            }
            atoms.push(Atom {
                x,
                t: height,
                w: spacing.powi(n as i32),
            });
        }
        DiscreteMeasure::new(n, atoms)
    }

    /// CSV rows `x1,...,xn,t,w` without a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            let mut fields: Vec<String> = a.x.iter().map(|v| format!("{v:?}")).collect();
            fields.push(format!("{:?}", a.t));
            fields.push(format!("{:?}", a.w));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Strict parser for rows `x1,...,xn,t,w`. Lines starting with `#` are
    /// comments; nonpositive t or w are rejected.
    pub fn from_csv(text: &str, n: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut atoms = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| FraxError::Parse(e.to_string()))?;
            if rec.len() != n + 2 {
                return Err(FraxError::Parse(format!(
                    "row {} has {} fields, expected {}",
                    line + 1,
                    rec.len(),
                    n + 2
                )));
            }
            let vals = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| FraxError::Parse(format!("row {}: {e}", line + 1)))?;
            atoms.push(Atom {
                x: vals[..n].to_vec(),
                t: vals[n],
                w: vals[n + 1],
            });
        }
        DiscreteMeasure::new(n, atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mu = DiscreteMeasure::new(
            2,
            vec![
                Atom { x: vec![0.1, -2.0], t: 0.3, w: 1.5 },
                Atom { x: vec![1.0 / 3.0, 4.0], t: 2.0, w: 1e-7 },
            ],
        )
        .unwrap();
        assert_eq!(DiscreteMeasure::from_csv(&mu.to_csv(), 2).unwrap(), mu);
    }

    #[test]
    fn rejects_nonpositive_height_or_mass() {
        assert!(DiscreteMeasure::from_csv("0,0,1\n", 1).is_err());
        assert!(DiscreteMeasure::from_csv("0,1,-1\n", 1).is_err());
        assert!(DiscreteMeasure::from_csv("0,1\n", 1).is_err());
        assert!(DiscreteMeasure::from_csv("a,1,1\n", 1).is_err());
        assert!(DiscreteMeasure::from_csv("# comment\n0,1,1\n", 1).is_ok());
    }

    #[test]
    fn slab_mass_matches_length() {
        let mu = DiscreteMeasure::slab(1, 1.0, 0.5, 10.0).unwrap();
        assert_eq!(mu.len(), 41);
        assert!((mu.total_mass() - 20.5).abs() < 1e-12);
    }
}
