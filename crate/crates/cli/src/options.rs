//! Flags and the strict JSON config they mirror.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use frax_core::field::GridSpec;
use frax_core::kernel::LaguerreRule;
use frax_core::{FraxError, Params, Result};

#[derive(Debug, Parser)]
#[command(
    name = "frax",
    version,
    about = "Fractional Poisson extension: kernels, energy identities, trace inequalities and Carleson conditions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON file whose keys are flag names; explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// G_s, G'_s, the Fourier symbol and the Poisson kernel at radii --r.
    Kernel,
    /// Normalizations, the moment constant (with --a) and the energy constants.
    Constants,
    /// Extension of a catalog function on the grid.
    Extend,
    /// Identity, trace-inequality and oracle checks (--check).
    Verify,
    /// Carleson-type conditions and embeddings for a measure (--condition).
    Carleson,
    /// Hausdorff content of balls (--r) or open sets (--sets).
    Capacity,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Constants => "constants",
            Command::Extend => "extend",
            Command::Verify => "verify",
            Command::Carleson => "carleson",
            Command::Capacity => "capacity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Every flag, each mapped to one config key of the same name.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Spatial dimension (1..=3).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Extension order in (0, 2).
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Smoothness order beta.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Order gamma of the fractional-Laplacian energy.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Integrability exponent p.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Besov/capacity exponent q; `inf` is accepted.
    #[arg(long, global = true)]
    #[serde(default, deserialize_with = "extended_float")]
    pub q: Option<f64>,
    /// Measure-side exponent q0.
    #[arg(long, global = true)]
    pub q0: Option<f64>,
    /// Exponent of the weight t^alpha.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Grid points per axis (power of two).
    #[arg(long = "grid-N", global = true)]
    #[serde(rename = "grid-N")]
    pub grid_n: Option<usize>,
    /// Half-width L of the box [-L, L)^n.
    #[arg(long = "grid-L", global = true)]
    #[serde(rename = "grid-L")]
    pub grid_l: Option<f64>,
    /// Smallest extension level t (default h/10^4).
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    /// Largest extension level t (default 8L).
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Number of log-spaced levels.
    #[arg(long, global = true)]
    pub t_count: Option<usize>,
    /// Gauss–Laguerre node count.
    #[arg(long, global = true)]
    pub quad_count: Option<usize>,
    /// Tolerance of the selected checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Catalog function name.
    #[arg(long, global = true, value_name = "NAME")]
    pub f: Option<String>,
    /// Measure CSV with rows x1,...,xn,t,w.
    #[arg(long, global = true, value_name = "PATH")]
    pub measure: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format (json by default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// verify: identity-grad, identity-dt, identity-frac, trace-sobolev,
    /// trace-logsobolev, trace-hardy, affine-trace, general-p,
    /// symbol-identity, moment-identity or all.
    #[arg(long, global = true)]
    pub check: Option<String>,
    /// verify: energy variant grad, dt or frac.
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// verify general-p: eq3.14, eq3.15, eq3.16 or eq3.20.
    #[arg(long, global = true)]
    pub which: Option<String>,
    /// Number of dilations 2^(-k/4) of --f to sweep over.
    #[arg(long, global = true)]
    pub sweep: Option<usize>,
    /// Sphere directions of the affine energy.
    #[arg(long, global = true)]
    pub directions: Option<usize>,
    /// constants/verify: moment exponent a.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// verify moment-identity: frequencies |xi|.
    #[arg(long, global = true, value_delimiter = ',')]
    pub xi: Option<Vec<f64>>,
    /// kernel/capacity: radii.
    #[arg(long, global = true, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// extend: value, dt or frac.
    #[arg(long, global = true)]
    pub component: Option<String>,
    /// carleson: vi, v, minimizing or embedding.
    #[arg(long, global = true)]
    pub condition: Option<String>,
    /// carleson embedding: case1, case2 or case3.
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// JSON array of open sets ({"kind", "components"}).
    #[arg(long, global = true, value_name = "PATH")]
    pub sets: Option<PathBuf>,
    /// carleson minimizing: mass levels lambda.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// carleson: largest radius of the ball search.
    #[arg(long, global = true)]
    pub max_radius: Option<f64>,
}

/// A number, or one of the strings "inf" / "infinity".
fn extended_float<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Value {
        Number(f64),
        Text(String),
    }
    match Option::<Value>::deserialize(d)? {
        None => Ok(None),
        Some(Value::Number(v)) => Ok(Some(v)),
        Some(Value::Text(t)) if t == "inf" || t == "infinity" => Ok(Some(f64::INFINITY)),
        Some(Value::Text(t)) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got \"{t}\""))),
    }
}

pub fn usage(msg: impl Into<String>) -> FraxError {
    FraxError::Parse(msg.into())
}

macro_rules! option_fields {
    ($($field:ident => $key:literal),* $(,)?) => {
        impl Options {
            /// Fields set in `self`, falling back to `base`.
            fn overlay(self, base: Options) -> Options {
                Options { $($field: self.$field.or(base.$field)),* }
            }

            /// Config keys of the options that are set.
            pub fn set_keys(&self) -> Vec<&'static str> {
                let mut keys = Vec::new();
                $(if self.$field.is_some() { keys.push($key); })*
                keys
            }
        }
    };
}

option_fields! {
    n => "n", s => "s", beta => "beta", gamma => "gamma", p => "p", q => "q", q0 => "q0",
    alpha => "alpha", grid_n => "grid-N", grid_l => "grid-L", t_min => "t-min",
    t_max => "t-max", t_count => "t-count", quad_count => "quad-count", tol => "tol",
    f => "f", measure => "measure", out => "out", format => "format", check => "check",
    variant => "variant", which => "which", sweep => "sweep", directions => "directions",
    a => "a", xi => "xi", r => "r", component => "component", condition => "condition",
    case => "case", sets => "sets", lambdas => "lambdas", max_radius => "max-radius",
}

impl Options {
    /// Loads the config at `path`; flags set in `self` take precedence.
    ///
    /// The file is a JSON object keyed by flag names, plus an optional
    /// `command` that must match the subcommand.
    pub fn merged_with_file(self, path: &Path, command: Command) -> Result<Options> {
        let text = std::fs::read_to_string(path)?;
        let bad = |e: String| usage(format!("config {}: {e}", path.display()));
        let mut doc: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if let Some(c) = doc.remove("command") {
            let c: Command = serde_json::from_value(c).map_err(|e| bad(e.to_string()))?;
            if c != command {
                return Err(bad(format!(
                    "written for '{}' but the command is '{}'",
                    c.as_str(),
                    command.as_str()
                )));
            }
        }
        let base: Options =
            serde_json::from_value(serde_json::Value::Object(doc)).map_err(|e| bad(e.to_string()))?;
        Ok(self.overlay(base))
    }

    /// Rejects options the command does not read.
    pub fn restrict_to(&self, command: Command, allowed: &[&str]) -> Result<()> {
        for key in self.set_keys() {
            if !COMMON.contains(&key) && !allowed.contains(&key) {
                return Err(usage(format!("--{key} is not used by '{}'", command.as_str())));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.n.unwrap_or(1)
    }

    pub fn params(&self) -> Result<Params> {
        let d = Params::default();
        let prm = Params {
            n: self.dimension(),
            s: self.s.unwrap_or(d.s),
            beta: self.beta.unwrap_or(d.beta),
            gamma: self.gamma.unwrap_or(d.gamma),
            p: self.p.unwrap_or(d.p),
            q: self.q.unwrap_or(d.q),
            q0: self.q0.unwrap_or(d.q0),
            alpha: self.alpha.unwrap_or(d.alpha),
        };
        prm.check_kernel()?;
        Ok(prm)
    }

    /// Box grid: defaults N = 256, 64, 32 and L = 16, 10, 8 for n = 1, 2, 3.
    pub fn grid(&self) -> Result<GridSpec> {
        let n = self.dimension();
        let idx = n.clamp(1, 3) - 1;
        let big_n = self.grid_n.unwrap_or([256, 64, 32][idx]);
        let l = self.grid_l.unwrap_or([16.0, 10.0, 8.0][idx]);
        let mut spec = GridSpec::new(n, l, big_n)?;
        if self.t_min.is_some() || self.t_max.is_some() {
            spec = spec.with_t_bounds(self.t_min.unwrap_or(spec.t_min), self.t_max.unwrap_or(spec.t_max))?;
        }
        if let Some(m) = self.t_count {
            spec = spec.with_t_range(spec.t_min, spec.t_max, m)?;
        }
        Ok(spec)
    }

    pub fn rule(&self) -> Result<LaguerreRule> {
        match self.quad_count {
            Some(c) => LaguerreRule::new(c),
            None => Ok(LaguerreRule::shared().clone()),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

/// Options every command accepts.
const COMMON: &[&str] = &["n", "s", "out", "format", "quad-count"];
