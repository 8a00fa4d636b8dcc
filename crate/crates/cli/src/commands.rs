//! One function per subcommand; each returns the text to emit and whether
//! any check failed.

use std::fs;

use serde::Serialize;

use frax_core::carleson::{
    ball_capacity_surrogate, condition_v, condition_vi, embedding_test, hausdorff_content,
    minimizing_function, Ball, BallSearch, CapacityCase, CapacityParams, OpenSet,
};
use frax_core::field::catalog::{self, TestFunction};
use frax_core::field::{ExtensionPlan, Component, GridSpec};
use frax_core::functionals::{normalize_l2, DiscreteMeasure};
use frax_core::kernel::{
    energy_constant_dt, energy_constant_frac, energy_constant_grad, eval_g, eval_g_prime,
    fourier_symbol, moment_constant, poisson_kernel, KernelConstants,
};
use frax_core::verify::{
    check_moment_identity, check_symbol_identity, reports_to_csv, reports_to_json_lines,
    stability_report, to_json_fixed, CheckKind, GeneralP, Report, Variant, Verifier,
};
use frax_core::{Params, Result};

use crate::options::{usage, Command, Format, Options};

pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

impl Outcome {
    fn document<T: Serialize>(value: &T) -> Self {
        Outcome {
            text: to_json_fixed(value) + "\n",
            failed: false,
        }
    }

    fn reports(reports: &[Report], format: Format) -> Self {
        let text = match format {
            Format::Json => reports_to_json_lines(reports),
            Format::Csv => reports_to_csv(reports),
        };
        Outcome {
            text,
            failed: reports.iter().any(|r| !r.passed()),
        }
    }
}

pub fn run(command: Command, opts: &Options) -> Result<Outcome> {
    match command {
        Command::Kernel => kernel(opts),
        Command::Constants => constants(opts),
        Command::Extend => extend(opts),
        Command::Verify => verify(opts),
        Command::Carleson => carleson(opts),
        Command::Capacity => capacity(opts),
    }
}

#[derive(Serialize)]
struct KernelRow {
    r: f64,
    g: f64,
    g_prime: f64,
    symbol: f64,
    poisson: f64,
}

fn kernel(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(Command::Kernel, &["r"])?;
    let prm = opts.params()?;
    let rule = opts.rule()?;
    let radii = opts.r.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0]);
    let rows = radii
        .iter()
        .map(|&r| {
            let mut x = vec![0.0; prm.n];
            x[0] = r;
            Ok(KernelRow {
                r,
                g: eval_g(prm.s, r, &rule)?,
                g_prime: eval_g_prime(prm.s, r, &rule)?,
                symbol: fourier_symbol(&prm, 1.0, r, &rule)?,
                poisson: poisson_kernel(&prm, &x, 1.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match opts.format() {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                command: &'static str,
                n: usize,
                s: f64,
                quad_count: usize,
                rows: &'a [KernelRow],
            }
            Outcome::document(&Doc {
                command: "kernel",
                n: prm.n,
                s: prm.s,
                quad_count: rule.count(),
                rows: &rows,
            })
        }
        Format::Csv => {
            let mut text = String::from("r,g,g_prime,symbol,poisson\n");
            for row in &rows {
                text.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    row.r, row.g, row.g_prime, row.symbol, row.poisson
                ));
            }
            Outcome { text, failed: false }
        }
    })
}

fn constants(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(Command::Constants, &["a", "beta", "gamma"])?;
    let prm = opts.params()?;
    let rule = opts.rule()?;
    let k = KernelConstants::new(prm.n, prm.s)?;
    #[derive(Serialize)]
    struct Doc {
        command: &'static str,
        n: usize,
        s: f64,
        beta: f64,
        gamma: f64,
        c_ns: f64,
        symbol_norm: f64,
        c_s: f64,
        a: Option<f64>,
        moment_constant: Option<f64>,
        energy_constant_dt: Option<f64>,
        energy_constant_grad: Option<f64>,
        energy_constant_frac: Option<f64>,
    }
    let moment = opts.a.map(|a| moment_constant(&prm, a, &rule)).transpose()?;
    let doc = Doc {
        command: "constants",
        n: prm.n,
        s: prm.s,
        beta: prm.beta,
        gamma: prm.gamma,
        c_ns: k.c_ns,
        symbol_norm: k.symbol_norm,
        c_s: k.c_s,
        a: opts.a,
        moment_constant: moment,
        energy_constant_dt: energy_constant_dt(&prm, &rule).ok(),
        energy_constant_grad: energy_constant_grad(&prm, &rule).ok(),
        energy_constant_frac: energy_constant_frac(&prm, &rule).ok(),
    };
    match opts.format() {
        Format::Json => Ok(Outcome::document(&doc)),
        Format::Csv => {
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
            let text = format!(
                "name,value\nc_ns,{:.16e}\nsymbol_norm,{:.16e}\nc_s,{:.16e}\nmoment_constant,{}\nenergy_constant_dt,{}\nenergy_constant_grad,{}\nenergy_constant_frac,{}\n",
                doc.c_ns,
                doc.symbol_norm,
                doc.c_s,
                cell(doc.moment_constant),
                cell(doc.energy_constant_dt),
                cell(doc.energy_constant_grad),
                cell(doc.energy_constant_frac)
            );
            Ok(Outcome { text, failed: false })
        }
    }
}

fn catalog_function(opts: &Options, default: &str) -> Result<TestFunction> {
    catalog::by_name(opts.f.as_deref().unwrap_or(default), opts.dimension())
}

fn extend(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(
        Command::Extend,
        &["f", "grid-N", "grid-L", "t-min", "t-max", "t-count", "component", "gamma"],
    )?;
    let prm = opts.params()?;
    let spec = opts.grid()?;
    let f = catalog_function(opts, "gaussian")?.sample(&spec)?;
    let component = match opts.component.as_deref().unwrap_or("value") {
        "value" => Component::Value,
        "dt" => Component::TimeDerivative,
        "frac" => Component::Fractional(prm.gamma),
        other => return Err(usage(format!("unknown component '{other}' (value, dt or frac)"))),
    };
    let u = ExtensionPlan::new(&f, &prm, &opts.rule()?)?.field(component)?;
    let text = match opts.format() {
        Format::Json => u.to_json() + "\n",
        Format::Csv => u.to_csv(),
    };
    Ok(Outcome { text, failed: false })
}

const VERIFY_KEYS: &[&str] = &[
    "beta", "gamma", "p", "alpha", "grid-N", "grid-L", "t-min", "t-max", "t-count", "tol", "f",
    "check", "variant", "which", "sweep", "directions", "a", "xi",
];

fn verify(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(Command::Verify, VERIFY_KEYS)?;
    let prm = opts.params()?;
    let mut verifier = Verifier {
        rule: opts.rule()?,
        ..Verifier::default()
    };
    if let Some(t) = opts.tol {
        verifier.identity_tolerance = t;
        verifier.stability_tolerance = t;
    }
    if let Some(d) = opts.directions {
        verifier.direction_count = d;
    }
    let check = opts.check.as_deref().ok_or_else(|| usage("verify needs --check"))?;
    let reports = match check {
        "symbol-identity" => vec![symbol_identity(&prm, opts, &verifier)?],
        "moment-identity" => {
            let a = opts.a.unwrap_or(1.0);
            let tol = opts.tol.unwrap_or(0.01);
            opts.xi
                .clone()
                .unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0])
                .iter()
                .map(|&xi| {
                    check_moment_identity(&prm, a, xi, &verifier.rule, tol).map(|mut r| {
                        r.name = format!("moment-identity[xi={xi}]");
                        r
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        "all" => {
            let spec = opts.grid()?;
            let f = catalog_function(opts, "gaussian")?.sample(&spec)?;
            let mut out = Vec::new();
            for name in ["identity-grad", "identity-dt", "identity-frac"] {
                if let Ok(r) = single_check(name, &verifier, &f, &prm, opts) {
                    out.push(r);
                }
            }
            for name in ["trace-sobolev", "trace-logsobolev", "trace-hardy"] {
                for v in ["grad", "dt", "frac"] {
                    let mut o = opts.clone();
                    o.variant = Some(v.to_string());
                    if let Ok(r) = single_check(name, &verifier, &f, &prm, &o) {
                        out.push(r);
                    }
                }
            }
            if out.is_empty() {
                return Err(usage("no check is admissible for these parameters"));
            }
            out
        }
        name => {
            let spec = opts.grid()?;
            match opts.sweep {
                None | Some(0) => {
                    let f = catalog_function(opts, default_function(name))?.sample(&spec)?;
                    vec![single_check(name, &verifier, &f, &prm, opts)?]
                }
                Some(count) => {
                    let base = catalog_function(opts, default_function(name))?;
                    let mut out = Vec::with_capacity(count + 1);
                    for tf in catalog::dilation_sweep(&base, count, -0.25) {
                        let mut r = single_check(name, &verifier, &tf.sample(&spec)?, &prm, opts)?;
                        r.name = format!("{}[{}]", r.name, tf.name);
                        out.push(r);
                    }
                    let ratios: Vec<f64> = out.iter().map(|r| r.ratio).collect();
                    let label = out[0].name.split('[').next().unwrap_or(name).to_string();
                    out.push(stability_report(format!("{label}-stability"), prm, &ratios, verifier.stability_tolerance));
                    out
                }
            }
        }
    };
    Ok(Outcome::reports(&reports, opts.format()))
}

fn default_function(check: &str) -> &'static str {
    match check {
        "affine-trace" | "general-p" => "gaussian-difference",
        _ => "gaussian",
    }
}

fn variant(opts: &Options) -> Result<Variant> {
    match opts.variant.as_deref().unwrap_or("grad") {
        "grad" => Ok(Variant::Grad),
        "dt" => Ok(Variant::Dt),
        "frac" => Ok(Variant::Frac),
        other => Err(usage(format!("unknown variant '{other}' (grad, dt or frac)"))),
    }
}

fn single_check(
    name: &str,
    verifier: &Verifier,
    f: &frax_core::field::GridFunction,
    prm: &Params,
    opts: &Options,
) -> Result<Report> {
    match name {
        "identity-grad" => verifier.identity_gradient(f, prm),
        "identity-dt" => verifier.identity_dt(f, prm),
        "identity-frac" => verifier.identity_frac(f, prm),
        "trace-sobolev" => verifier.trace_sobolev(f, prm, variant(opts)?),
        "trace-logsobolev" => verifier.trace_logsobolev(&normalize_l2(f)?, prm, variant(opts)?),
        "trace-hardy" => verifier.trace_hardy(f, prm, variant(opts)?),
        "affine-trace" => verifier.affine_trace(f, prm),
        "general-p" => verifier.general_p(f, prm, GeneralP::parse(opts.which.as_deref().unwrap_or("eq3.15"))?),
        other => Err(usage(format!("unknown check '{other}'"))),
    }
}

/// Periodized-kernel oracle at t = 1 on a grid wide enough for the kernel's
/// algebraic tail.
fn symbol_identity(prm: &Params, opts: &Options, verifier: &Verifier) -> Result<Report> {
    let (l, big_n, images) = match prm.n {
        1 => (100.0, 4096, 256),
        2 => (32.0, 256, 16),
        _ => return Err(usage("symbol-identity supports n = 1 and n = 2")),
    };
    let spec = GridSpec::new(prm.n, opts.grid_l.unwrap_or(l), opts.grid_n.unwrap_or(big_n))?;
    check_symbol_identity(prm, 1.0, &spec, 64, images, &verifier.rule, opts.tol.unwrap_or(1e-3))
}

const CARLESON_KEYS: &[&str] = &[
    "beta", "p", "q", "q0", "measure", "condition", "case", "sets", "lambdas", "max-radius", "f",
    "sweep", "grid-N", "grid-L", "t-min", "t-max", "t-count",
];

fn carleson(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(Command::Carleson, CARLESON_KEYS)?;
    let mut prm = opts.params()?;
    let n = prm.n;
    let path = opts.measure.as_ref().ok_or_else(|| usage("carleson needs --measure"))?;
    let mu = DiscreteMeasure::from_csv(&fs::read_to_string(path)?, n)?;
    let condition = opts.condition.as_deref().ok_or_else(|| usage("carleson needs --condition"))?;
    if opts.q.is_none() && condition != "embedding" {
        prm.q = prm.p;
    }
    let cp = CapacityParams::from_params(&prm);
    let mut search = BallSearch::default();
    if let Some(r) = opts.max_radius {
        search = search.with_max_radius(r);
    }
    let family = || -> Result<Vec<OpenSet>> {
        match &opts.sets {
            Some(p) => read_sets(p, n),
            None => search.family(&mu),
        }
    };
    match condition {
        "vi" => {
            let sup = condition_vi(&mu, &cp, &search)?;
            let mut r = Report::new("condition-vi", CheckKind::Empirical, prm, sup.value, 1.0, 0.0)
                .extra("witness_mass", sup.witness_mass)
                .extra("candidates", sup.candidates as f64)
                .extra("total_mass", mu.total_mass());
            if let Some(w) = &sup.witness {
                r = witness_extras(r, w);
            }
            Ok(Outcome::reports(&[r], opts.format()))
        }
        "v" => {
            let sets = family()?;
            let sup = condition_v(&mu, &cp, &sets)?;
            let mut r = Report::new("condition-v", CheckKind::Empirical, prm, sup.value, 1.0, 0.0)
                .extra("witness_mass", sup.witness_mass)
                .extra("witness_capacity", sup.witness_capacity)
                .extra("family_size", sets.len() as f64)
                .note("capacity replaced by the Hausdorff-content surrogate");
            if let Some(i) = sup.witness {
                r = r.extra("witness_index", i as f64);
                if let Some(b) = sets[i].balls().next().filter(|_| sets[i].components().len() == 1) {
                    r = witness_extras(r, b);
                }
            }
            Ok(Outcome::reports(&[r], opts.format()))
        }
        "minimizing" => {
            let sets = family()?;
            let lambdas = match &opts.lambdas {
                Some(l) => l.clone(),
                None => {
                    let total = mu.total_mass().max(f64::MIN_POSITIVE);
                    (0..12).map(|k| total * 2f64.powi(k - 10)).collect()
                }
            };
            let m = minimizing_function(&mu, &cp, &lambdas, &sets)?;
            let ok = m.is_nondecreasing();
            let text = match opts.format() {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Doc<'a> {
                        command: &'static str,
                        lambdas: &'a [f64],
                        values: &'a [f64],
                        nondecreasing: bool,
                        family_size: usize,
                    }
                    to_json_fixed(&Doc {
                        command: "minimizing",
                        lambdas: &m.lambdas,
                        values: &m.values,
                        nondecreasing: ok,
                        family_size: sets.len(),
                    }) + "\n"
                }
                Format::Csv => {
                    let mut t = String::from("lambda,value\n");
                    for (l, v) in m.lambdas.iter().zip(&m.values) {
                        t.push_str(&format!("{l:.16e},{v:.16e}\n"));
                    }
                    t
                }
            };
            Ok(Outcome { text, failed: !ok })
        }
        "embedding" => {
            let case = match &opts.case {
                Some(c) => CapacityCase::parse(c)?,
                None => cp.classify(n)?,
            };
            let spec = opts.grid()?;
            let base = catalog_function(opts, "gaussian")?;
            let sweep = catalog::dilation_sweep(&base, opts.sweep.unwrap_or(20), -0.25);
            let out = embedding_test(&mu, &prm, &sweep, &spec, case, &opts.rule()?)?;
            Ok(Outcome::reports(&[out.report], opts.format()))
        }
        other => Err(usage(format!("unknown condition '{other}' (vi, v, minimizing or embedding)"))),
    }
}

fn witness_extras(mut r: Report, w: &Ball) -> Report {
    r = r.extra("witness_radius", w.radius);
    for (d, c) in w.center.iter().enumerate() {
        r = r.extra(&format!("witness_center_{d}"), *c);
    }
    r
}

fn read_sets(path: &std::path::Path, n: usize) -> Result<Vec<OpenSet>> {
    let text = fs::read_to_string(path)?;
    let sets: Vec<OpenSet> =
        serde_json::from_str(&text).map_err(|e| usage(format!("sets {}: {e}", path.display())))?;
    if sets.iter().any(|s| s.dim() != n) {
        return Err(usage(format!("sets in {} are not all of dimension {n}", path.display())));
    }
    Ok(sets)
}

fn capacity(opts: &Options) -> Result<Outcome> {
    opts.restrict_to(Command::Capacity, &["beta", "p", "r", "sets"])?;
    let prm = opts.params()?;
    let n = prm.n;
    let d = n as f64 - prm.p * prm.beta;
    let mut reports = Vec::new();
    if let Some(path) = &opts.sets {
        for (i, set) in read_sets(path, n)?.iter().enumerate() {
            let c = hausdorff_content(set, d)?;
            reports.push(
                Report::new(format!("capacity-set[{i:04}]"), CheckKind::Empirical, prm, c.value, 1.0, 0.0)
                    .extra("dimension", d)
                    .extra("coarsest", c.by_depth[0]),
            );
        }
    }
    let radii = match (&opts.r, &opts.sets) {
        (Some(r), _) => r.clone(),
        (None, Some(_)) => Vec::new(),
        (None, None) => vec![1.0],
    };
    for r in radii {
        let set = OpenSet::ball(Ball::new(vec![0.0; n], r)?)?;
        let c = hausdorff_content(&set, d)?;
        let surrogate = ball_capacity_surrogate(n, r, prm.p, prm.beta)?;
        reports.push(
            Report::new(format!("capacity-ball[r={r}]"), CheckKind::Empirical, prm, c.value, surrogate, 0.0)
                .extra("radius", r)
                .extra("dimension", d),
        );
    }
    Ok(Outcome::reports(&reports, opts.format()))
}
