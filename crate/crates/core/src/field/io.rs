//! Text formats for [`GridFunction`] and [`ExtensionField`].
//!
//! CSV: a header `n,L,N`, one record with those three values, then one value
//! per line. JSON: the full spec plus a base64 payload of little-endian f64.
//! Extension fields store their levels consecutively, smallest t first.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::extension::ExtensionField;
use super::grid::{GridFunction, GridSpec};
use crate::error::{FraxError, Result};

pub const PAYLOAD_ENCODING: &str = "base64-f64le";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGrid {
    spec: GridSpec,
    encoding: String,
    values: String,
}

fn parse_err(msg: impl std::fmt::Display) -> FraxError {
    FraxError::Parse(msg.to_string())
}

impl GridFunction {
    pub fn to_csv(&self) -> String {
        let spec = self.spec();
        let mut out = String::with_capacity(24 * spec.len() + 32);
        out.push_str("n,L,N\n");
        out.push_str(&format!(
            "{},{},{}\n",
            spec.n, spec.half_width, spec.points_per_axis
        ));
        for v in self.values() {
            out.push_str(&format!("{v:?}\n"));
        }
        out
    }

    /// Parses [`GridFunction::to_csv`] output. The time range is reset to the
    /// defaults of [`GridSpec::new`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(parse_err)?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["n", "L", "N"] {
            return Err(parse_err(format!("expected header n,L,N, found {names:?}")));
        }
        let mut records = rdr.records();
        let first = records
            .next()
            .ok_or_else(|| parse_err("missing grid description record"))?
            .map_err(parse_err)?;
        if first.len() != 3 {
            return Err(parse_err("grid description must have three fields"));
        }
        let n: usize = first[0].parse().map_err(parse_err)?;
        let half_width: f64 = first[1].parse().map_err(parse_err)?;
        let points: usize = first[2].parse().map_err(parse_err)?;
        let spec = GridSpec::new(n, half_width, points)?;
        let mut values = Vec::with_capacity(spec.len());
        for rec in records {
            let rec = rec.map_err(parse_err)?;
            if rec.len() != 1 {
                return Err(parse_err(format!(
                    "value line {} has {} fields",
                    values.len() + 1,
                    rec.len()
                )));
            }
            values.push(rec[0].parse::<f64>().map_err(parse_err)?);
        }
        GridFunction::new(spec, values)
    }

    pub fn to_json(&self) -> String {
        let bytes: Vec<u8> = self.values().iter().flat_map(|v| v.to_le_bytes()).collect();
        let doc = JsonGrid {
            spec: *self.spec(),
            encoding: PAYLOAD_ENCODING.to_string(),
            values: STANDARD.encode(bytes),
        };
        serde_json::to_string(&doc).expect("grid documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonGrid = serde_json::from_str(text).map_err(parse_err)?;
        if doc.encoding != PAYLOAD_ENCODING {
            return Err(parse_err(format!("unsupported encoding {}", doc.encoding)));
        }
        GridFunction::new(doc.spec, decode(&doc.values)?)
    }
}

impl ExtensionField {
    /// Same document layout as [`GridFunction::to_json`], payload level by level.
    pub fn to_json(&self) -> String {
        let bytes: Vec<u8> = self.values().iter().flat_map(|v| v.to_le_bytes()).collect();
        let doc = JsonGrid {
            spec: *self.spec(),
            encoding: PAYLOAD_ENCODING.to_string(),
            values: STANDARD.encode(bytes),
        };
        serde_json::to_string(&doc).expect("grid documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonGrid = serde_json::from_str(text).map_err(parse_err)?;
        if doc.encoding != PAYLOAD_ENCODING {
            return Err(parse_err(format!("unsupported encoding {}", doc.encoding)));
        }
        ExtensionField::new(doc.spec, decode(&doc.values)?)
    }

    /// Rows `t,x1,...,xn,u` under a header line.
    pub fn to_csv(&self) -> String {
        let spec = self.spec();
        let n = spec.n;
        let mut out = String::from("t");
        for d in 0..n {
            out.push_str(&format!(",x{}", d + 1));
        }
        out.push_str(",u\n");
        for (j, t) in self.t_levels().iter().enumerate() {
            for (i, v) in self.level(j).iter().enumerate() {
                let x = spec.point(i);
                out.push_str(&format!("{t:?}"));
                for c in &x[..n] {
                    out.push_str(&format!(",{c:?}"));
                }
                out.push_str(&format!(",{v:?}\n"));
            }
        }
        out
    }
}

fn decode(payload: &str) -> Result<Vec<f64>> {
    let bytes = STANDARD.decode(payload.as_bytes()).map_err(parse_err)?;
    if bytes.len() % 8 != 0 {
        return Err(parse_err("payload length is not a multiple of 8"));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFunction {
        let spec = GridSpec::new(2, 3.5, 8).unwrap();
        GridFunction::from_fn(spec, |x| (x[0] * 1.7).sin() / 3.0 + x[1] * 1e-300).unwrap()
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let f = sample();
        let g = GridFunction::from_csv(&f.to_csv()).unwrap();
        assert_eq!(f.spec(), g.spec());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = sample().with_spec(
            GridSpec::new(2, 3.5, 8).unwrap().with_t_range(0.1, 9.0, 7).unwrap(),
        );
        let f = f.unwrap();
        let g = GridFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(GridFunction::from_csv("a,b,c\n1,2,4\n").is_err());
        assert!(GridFunction::from_csv("n,L,N\n1,2,4\n0.5\n").is_err());
        assert!(GridFunction::from_csv("n,L,N\n1,2,2\n0.5\nx\n").is_err());
        assert!(GridFunction::from_json("{\"spec\":1}").is_err());
    }

    #[test]
    fn extension_field_round_trip() {
        let spec = GridSpec::new(1, 2.0, 4).unwrap().with_t_range(0.5, 2.0, 3).unwrap();
        let values: Vec<f64> = (0..12).map(|i| i as f64 / 7.0).collect();
        let u = ExtensionField::new(spec, values).unwrap();
        assert_eq!(ExtensionField::from_json(&u.to_json()).unwrap(), u);
        let csv = u.to_csv();
        assert!(csv.starts_with("t,x1,u\n"));
        assert_eq!(csv.lines().count(), 13);
    }
}
