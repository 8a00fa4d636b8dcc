use std::collections::BTreeMap;
use std::io;

use serde::{Serialize, Serializer};
use serde_json::ser::Formatter;

use crate::params::Params;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    /// Passed, but an extrapolated tail carried a noticeable share.
    WarnTail,
    Fail,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::WarnTail => "warn(tail)",
            Status::Fail => "fail",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Fail)
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// What a report's ratio means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Exact identity: ratio should be 1.
    Identity,
    /// Inequality with a non-explicit constant: ratio only needs to be finite
    /// and positive.
    Inequality,
    /// Spread (max/min) of ratios across a sweep.
    Stability,
    /// Numerical oracle comparison: ratio is a relative error.
    Oracle,
    /// Empirical estimate of a non-explicit constant.
    Empirical,
}

/// Structured result of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: CheckKind,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub predicted_constant: Option<f64>,
    pub ratio: f64,
    pub tolerance: f64,
    pub status: Status,
    /// Diagnostics, in key order.
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Report {
    /// ratio = lhs/rhs, with 0/0 read as 1 for identities and 0 otherwise.
    pub fn new(name: impl Into<String>, kind: CheckKind, params: Params, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let ratio = if rhs != 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            if kind == CheckKind::Identity {
                1.0
            } else {
                0.0
            }
        } else {
            f64::INFINITY
        };
        let mut r = Report {
            name: name.into(),
            kind,
            params,
            lhs,
            rhs,
            predicted_constant: None,
            ratio,
            tolerance,
            status: Status::Pass,
            extras: BTreeMap::new(),
            notes: Vec::new(),
        };
        r.status = r.derive_status(false);
        r
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.predicted_constant = Some(c);
        self
    }

    pub fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Recomputes the status; a tail warning downgrades a pass.
    pub fn with_tail_warning(mut self, warn: bool) -> Self {
        self.status = self.derive_status(warn);
        if warn {
            self.notes.push("extrapolated time tail above threshold".into());
        }
        self
    }

    fn derive_status(&self, tail_warning: bool) -> Status {
        let ok = match self.kind {
            CheckKind::Identity => (self.ratio - 1.0).abs() < self.tolerance,
            CheckKind::Stability => self.ratio.is_finite() && self.ratio - 1.0 < self.tolerance,
            CheckKind::Oracle => self.ratio.is_finite() && self.ratio < self.tolerance,
            CheckKind::Inequality => {
                self.ratio.is_finite() && (self.ratio > 0.0 || (self.lhs == 0.0 && self.rhs == 0.0))
            }
            CheckKind::Empirical => self.ratio.is_finite() && self.ratio >= 0.0,
        };
        match (ok, tail_warning) {
            (false, _) => Status::Fail,
            (true, true) => Status::WarnTail,
            (true, false) => Status::Pass,
        }
    }

    pub fn passed(&self) -> bool {
        !self.status.is_failure()
    }

    /// One JSON object on a single line, floats at 17 significant digits.
    pub fn to_json_line(&self) -> String {
        to_json_fixed(self)
    }
}

/// Report of the spread max/min of a family of ratios.
pub fn stability_report(name: impl Into<String>, params: Params, ratios: &[f64], tolerance: f64) -> Report {
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let valid = ratios.iter().all(|r| r.is_finite() && *r > 0.0) && !ratios.is_empty();
    let mut r = Report::new(name, CheckKind::Stability, params, max, min, tolerance);
    if !valid {
        r.ratio = f64::INFINITY;
        r.status = Status::Fail;
    }
    r.extra("count", ratios.len() as f64)
}

/// serde_json formatter printing every float as `{:.16e}`.
pub struct FixedFloatFormatter;

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with the fixed float format; non-finite floats become null.
pub fn to_json_fixed<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Reports sorted by name, one JSON object per line.
pub fn reports_to_json_lines(reports: &[Report]) -> String {
    let mut sorted: Vec<&Report> = reports.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    sorted.iter().map(|r| r.to_json_line() + "\n").collect()
}

/// CSV summary `name,ratio,status`, sorted by name.
pub fn reports_to_csv(reports: &[Report]) -> String {
    let mut sorted: Vec<&Report> = reports.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["name", "ratio", "status"]).expect("in-memory write");
    for r in sorted {
        wtr.write_record([r.name.as_str(), &format!("{:.16e}", r.ratio), r.status.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("flush to memory")).expect("UTF-8")
}
