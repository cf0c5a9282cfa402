//! Command-line front end: `eval`, `table`, `verify` and `demo`.
//!
//! Every run prints its manifest next to the results. JSON output has the
//! keys `manifest`, `checks`, `bounds`, `measurements`, `verdicts` and
//! `runtime_ms`; CSV tables have the header `x,value,err_est` and 17
//! significant digits. Exit codes: 0 pass, 1 failed check, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clt::{self, CoefficientScheme, MonteCarloConfig};
use crate::error::{Error, Result};
use crate::esseen1d::{self, Distribution1D, EsseenConfig};
use crate::esseen_multi::{self as em, LawK, MultiConfig, TruncatedMode, TruncationMap};
use crate::interpolation::{self as interp, CardinalMode, SampleSet};
use crate::kernels::{self, KernelConfig, KernelKind};
use crate::verify::{self, Suite, VerifyOptions};

/// Environment variable naming a JSON file of defaults.
pub const CONFIG_ENV: &str = "SELBERG_CONFIG";

/// Agreement of the fast kernel route with the series oracle, as verified
/// by the `kernels` suite; reported as the error field of kernel values.
const KERNEL_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "selberg",
    version,
    about = "Extremal functions, smoothing bounds and CLT checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file of defaults (seed, samples, tol, constants).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output format; `csv` applies to `eval` and `table`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a bound constant, e.g. `c1=0.3` (repeatable).
    #[arg(long = "constant", global = true, value_name = "NAME=VALUE")]
    constants: Vec<String>,
    /// Allow constants to be lowered below their defaults.
    #[arg(long = "unsafe", global = true)]
    unsafe_ok: bool,
    /// Record wall-clock time in `runtime_ms` (otherwise null, keeping
    /// the output byte-identical across runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function at one point.
    Eval {
        #[arg(long = "fn", alias = "kernel", value_enum)]
        func: Selector,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Interval length for `S` and `sigma`.
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Tolerance for `lambda`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Tabulate a function over `from, from + step, .., to`.
    Table {
        #[arg(long = "fn", alias = "kernel", value_enum)]
        func: Selector,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// A number replaces every tolerance; `name=value` one check's.
        #[arg(long, allow_hyphen_values = true)]
        tol: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replicas for the Monte Carlo checks.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run a bound or CLT scenario.
    Demo {
        #[arg(long, value_enum)]
        scenario: Scenario,
        /// Binomial size (smoothing scenarios).
        #[arg(long)]
        n: Option<u64>,
        /// Number of summands (CLT scenarios).
        #[arg(long = "N")]
        big_n: Option<usize>,
        /// Dimension (esseen-k).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Selector {
    #[value(name = "K")]
    K,
    #[value(name = "W")]
    W,
    #[value(name = "B")]
    B,
    #[value(name = "b")]
    Bminus,
    #[value(name = "S")]
    S,
    #[value(name = "sigma", alias = "σ")]
    Sigma,
    #[value(name = "Q")]
    Q,
    #[value(name = "lambda", alias = "λ")]
    Lambda,
    /// Cardinal-series reconstruction of `K` from `K(k/2)`.
    #[value(name = "cardinal")]
    Cardinal,
    /// Value-derivative reconstruction of `K(x/2)^2` from data on `Z`.
    #[value(name = "vaaler")]
    Vaaler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Scenario {
    #[value(name = "esseen1d-binomial")]
    Esseen1dBinomial,
    #[value(name = "esseen-k")]
    EsseenK,
    #[value(name = "clt-haar")]
    CltHaar,
    #[value(name = "clt-vector")]
    CltVector,
}

/// Defaults read from the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    parameters: BTreeMap<String, Value>,
    seed: Option<u64>,
    tolerances: BTreeMap<String, f64>,
    constant_overrides: BTreeMap<String, f64>,
    output: Option<String>,
    format: Format,
    version: &'static str,
}

#[derive(Debug, Serialize)]
struct Measurement {
    name: String,
    value: f64,
    err_est: f64,
}

#[derive(Debug, Serialize)]
struct Verdict {
    name: String,
    /// Whether a failure makes the run exit with status 1.
    asserted: bool,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    manifest: Manifest,
    checks: Vec<verify::Check>,
    bounds: Vec<Value>,
    measurements: Vec<Measurement>,
    verdicts: Vec<Verdict>,
    runtime_ms: Option<u64>,
}

impl Report {
    fn failed(&self) -> bool {
        self.checks.iter().any(|c| !c.passed)
            || self.verdicts.iter().any(|v| v.asserted && !v.passed)
    }
}

enum Usage {
    Bad(String),
    Failed(Error),
}

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage::Failed(e)
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(Usage::Bad(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Usage::Failed(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config(cli: &Cli) -> std::result::Result<FileConfig, Usage> {
    let Some(path) = &cli.config else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage::Bad(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Usage::Bad(format!("bad config {}: {e}", path.display())))
}

fn parse_pair(s: &str) -> std::result::Result<(String, f64), Usage> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Usage::Bad(format!("expected NAME=VALUE, got {s}")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Usage::Bad(format!("not a number: {value}")))?;
    Ok((name.trim().to_string(), v))
}

fn constant_overrides(
    cli: &Cli,
    file: &FileConfig,
) -> std::result::Result<BTreeMap<String, f64>, Usage> {
    let mut out = file.constants.clone();
    for s in &cli.constants {
        let (n, v) = parse_pair(s)?;
        out.insert(n, v);
    }
    Ok(out)
}

fn execute(cli: &Cli) -> std::result::Result<i32, Usage> {
    let file = load_config(cli)?;
    let constants = constant_overrides(cli, &file)?;
    let start = Instant::now();
    let mut manifest = Manifest {
        command: String::new(),
        parameters: BTreeMap::new(),
        seed: None,
        tolerances: BTreeMap::new(),
        constant_overrides: constants.clone(),
        output: cli.out.as_ref().map(|p| p.display().to_string()),
        format: Format::Json,
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut report = match &cli.command {
        Command::Eval { func, x, l, tol } => {
            manifest.command = "eval".into();
            manifest.format = cli.format.unwrap_or(Format::Csv);
            let x = match (func, x) {
                (Selector::Lambda, _) => None,
                (_, Some(x)) => Some(*x),
                (_, None) => return Err(Usage::Bad("--x is required".into())),
            };
            let tol = tol.or(file.tol).unwrap_or(5e-8);
            param(&mut manifest, "fn", json!(func));
            param(&mut manifest, "x", json!(x));
            param(&mut manifest, "l", json!(l));
            if *func == Selector::Lambda {
                manifest.tolerances.insert("lambda".into(), tol);
            }
            let row = evaluate(*func, x.unwrap_or(0.0), *l, tol)?;
            rows_report(manifest, vec![(x, row)])
        }
        Command::Table {
            func,
            from,
            to,
            step,
            l,
        } => {
            manifest.command = "table".into();
            manifest.format = cli.format.unwrap_or(Format::Csv);
            if !(*step > 0.0
                && step.is_finite()
                && from.is_finite()
                && to.is_finite()
                && to >= from)
            {
                return Err(Usage::Bad("need finite from <= to and step > 0".into()));
            }
            let count = ((to - from) / step + 1e-9).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(Usage::Bad("table too long".into()));
            }
            for (k, v) in [
                ("fn", json!(func)),
                ("from", json!(from)),
                ("to", json!(to)),
                ("step", json!(step)),
                ("l", json!(l)),
            ] {
                param(&mut manifest, k, v);
            }
            let rows = (0..count)
                .map(|i| {
                    let x = from + i as f64 * step;
                    evaluate(*func, x, *l, 5e-8).map(|r| (Some(x), r))
                })
                .collect::<Result<Vec<_>>>()?;
            rows_report(manifest, rows)
        }
        Command::Verify {
            suite,
            tol,
            seed,
            samples,
        } => {
            manifest.command = "verify".into();
            manifest.format = json_only(cli)?;
            let suite: Suite = suite
                .parse()
                .map_err(|e: Error| Usage::Bad(e.to_string()))?;
            let mut opts = VerifyOptions {
                seed: seed.or(file.seed).unwrap_or(7),
                tol: file.tol,
                ..VerifyOptions::default()
            };
            if let Some(s) = samples.or(file.samples) {
                if s < 1000 {
                    return Err(Usage::Bad("--samples must be at least 1000".into()));
                }
                opts.clt_samples = s;
            }
            for t in tol {
                if t.contains('=') {
                    let (n, v) = parse_pair(t)?;
                    opts.overrides.insert(n, v);
                } else {
                    opts.tol = Some(
                        t.parse()
                            .map_err(|_| Usage::Bad(format!("bad tolerance {t}")))?,
                    );
                }
            }
            param(&mut manifest, "suite", json!(suite.name()));
            param(&mut manifest, "samples", json!(opts.clt_samples));
            param(&mut manifest, "moment_samples", json!(opts.moment_samples));
            manifest.seed = Some(opts.seed);
            if let Some(t) = opts.tol {
                manifest.tolerances.insert("*".into(), t);
            }
            manifest.tolerances.extend(opts.overrides.clone());
            let checks = verify::run_suite(suite, &opts);
            let passed = verify::all_passed(&checks);
            let n = checks.len();
            Report {
                manifest,
                checks,
                bounds: vec![],
                measurements: vec![],
                verdicts: vec![Verdict {
                    name: "all-checks".into(),
                    asserted: true,
                    passed,
                    detail: format!("{n} checks"),
                }],
                runtime_ms: None,
            }
        }
        Command::Demo {
            scenario,
            n,
            big_n,
            k,
            omega,
            delta,
            seed,
            samples,
        } => {
            manifest.command = "demo".into();
            manifest.format = json_only(cli)?;
            let args = DemoArgs {
                n: *n,
                big_n: *big_n,
                k: *k,
                omega: *omega,
                delta: *delta,
                seed: seed.or(file.seed).unwrap_or(7),
                samples: samples.or(file.samples).unwrap_or(100_000),
                constants: constants.iter().map(|(a, b)| (a.clone(), *b)).collect(),
                unsafe_ok: cli.unsafe_ok,
            };
            param(&mut manifest, "scenario", json!(scenario));
            demo(*scenario, &args, manifest)?
        }
    };
    if cli.timing {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text = match report.manifest.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv_rows(&report),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Usage::Bad(format!("cannot write {}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(if report.failed() { 1 } else { 0 })
}

fn json_only(cli: &Cli) -> std::result::Result<Format, Usage> {
    match cli.format {
        Some(Format::Csv) => Err(Usage::Bad(
            "csv output is available for eval and table only".into(),
        )),
        _ => Ok(Format::Json),
    }
}

fn param(m: &mut Manifest, key: &str, v: Value) {
    m.parameters.insert(key.into(), v);
}

fn rows_report(manifest: Manifest, rows: Vec<(Option<f64>, interp::Estimate)>) -> Report {
    Report {
        manifest,
        checks: vec![],
        bounds: vec![],
        measurements: rows
            .into_iter()
            .map(|(x, e)| Measurement {
                name: x.map(|x| format!("{x:.17e}")).unwrap_or_default(),
                value: e.value,
                err_est: e.err_est,
            })
            .collect(),
        verdicts: vec![],
        runtime_ms: None,
    }
}

fn csv_rows(report: &Report) -> String {
    let mut s = String::from("x,value,err_est\n");
    for m in &report.measurements {
        // `lambda` has no argument; its x column is left empty
        let x = m.name.parse::<f64>().map(g17).unwrap_or_default();
        s.push_str(&format!("{x},{},{}\n", g17(m.value), g17(m.err_est)));
    }
    s
}

/// 17 significant digits.
fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn evaluate(func: Selector, x: f64, l: f64, tol: f64) -> Result<interp::Estimate> {
    let cfg = KernelConfig::default();
    let kern = |kind| {
        kernels::kernel_family_eval(kind, x, &cfg).map(|value| interp::Estimate {
            value,
            err_est: KERNEL_TOL,
        })
    };
    match func {
        Selector::K => kern(KernelKind::K),
        Selector::W => kern(KernelKind::W),
        Selector::B => kern(KernelKind::B),
        Selector::Bminus => kern(KernelKind::Bminus),
        Selector::S => kern(KernelKind::S(l)),
        Selector::Sigma => kern(KernelKind::Sigma(l)),
        Selector::Q => {
            if !x.is_finite() {
                return Err(Error::Domain("argument must be finite".into()));
            }
            Ok(interp::Estimate {
                value: kernels::q_eval(x),
                err_est: 1e-14,
            })
        }
        Selector::Lambda => {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput("tolerance must be positive".into()));
            }
            Ok(interp::Estimate {
                value: kernels::lambda_constant(tol),
                err_est: tol,
            })
        }
        Selector::Cardinal => {
            let s = SampleSet::cardinal(1.0, 10_000, kernels::fejer_k)?;
            interp::cardinal_series(&s, x, CardinalMode::Basic)
        }
        Selector::Vaaler => {
            let f = |t: f64| kernels::fejer_k(0.5 * t).powi(2);
            let df = |t: f64| kernels::fejer_k(0.5 * t) * kernels::fejer_k_prime(0.5 * t);
            let s = SampleSet::vaaler(1.0, 400, f, df)?.with_decay(4.0);
            interp::vaaler_interpolation(&s, x)
        }
    }
}

struct DemoArgs {
    n: Option<u64>,
    big_n: Option<usize>,
    k: Option<usize>,
    omega: Option<f64>,
    delta: Option<f64>,
    seed: u64,
    samples: usize,
    constants: Vec<(String, f64)>,
    unsafe_ok: bool,
}

fn measurement(name: impl Into<String>, value: f64, err_est: f64) -> Measurement {
    Measurement {
        name: name.into(),
        value,
        err_est,
    }
}

fn verdict(name: impl Into<String>, passed: bool, detail: String) -> Verdict {
    Verdict {
        name: name.into(),
        asserted: true,
        passed,
        detail,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// The 1-D constants `(c1, c2)` with overrides applied under the same
/// upward-only rule as the multivariate constants.
fn esseen_config(args: &DemoArgs) -> Result<EsseenConfig> {
    let mut cfg = EsseenConfig::default();
    for (name, v) in &args.constants {
        let slot = match name.as_str() {
            "c1" => &mut cfg.c1,
            "c2" => &mut cfg.c2,
            _ => continue,
        };
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "constant {name} must be positive"
            )));
        }
        if *v < *slot && !args.unsafe_ok {
            return Err(Error::InvalidInput(format!(
                "lowering {name} from {slot} to {v} needs the unsafe flag"
            )));
        }
        *slot = *v;
    }
    Ok(cfg)
}

fn multi_config(k: usize, args: &DemoArgs) -> Result<MultiConfig> {
    let mut cfg = MultiConfig::new(k)?;
    cfg.constants = cfg
        .constants
        .with_overrides(&args.constants, args.unsafe_ok)?;
    Ok(cfg)
}

fn demo(s: Scenario, a: &DemoArgs, mut manifest: Manifest) -> std::result::Result<Report, Usage> {
    let mut bounds = Vec::new();
    let mut measurements = Vec::new();
    let mut verdicts = Vec::new();
    let normal = Distribution1D::normal(0.0, 1.0);
    match s {
        Scenario::Esseen1dBinomial => {
            let n = a.n.unwrap_or(100);
            let omega = a.omega.unwrap_or(20.0);
            param(&mut manifest, "n", json!(n));
            param(&mut manifest, "omega", json!(omega));
            let cfg = esseen_config(a)?;
            let f = Distribution1D::binomial_standardized(n, 0.5)?;
            let grid = esseen1d::linspace(-5.0, 5.0, 2001);
            let d = esseen1d::sup_cdf_distance(&f, &normal, &grid);
            measurements.push(measurement("sup_distance", d, 1e-15));
            let fixed = esseen1d::esseen_bound_1d(&f, &normal, omega, &cfg)?;
            let best = esseen1d::optimize_omega(&f, &normal, -2..=9, &cfg)?;
            verdicts.push(verdict(
                "bound >= sup distance",
                fixed.total >= d && best.total >= d,
                format!(
                    "{:.6} (W = {omega}), {:.6} (W = {}) vs {d:.6}",
                    fixed.total, best.total, best.omega
                ),
            ));
            bounds.push(to_value(&fixed));
            bounds.push(to_value(&best));
        }
        Scenario::EsseenK => {
            let k = a.k.unwrap_or(2);
            if !(1..=3).contains(&k) {
                return Err(Usage::Bad("esseen-k supports 1 <= k <= 3".into()));
            }
            let n = a.n.unwrap_or(16);
            let omega = a.omega.unwrap_or(8.0);
            let delta = a.delta.unwrap_or(4.0);
            for (key, v) in [
                ("k", json!(k)),
                ("n", json!(n)),
                ("omega", json!(omega)),
                ("delta", json!(delta)),
            ] {
                param(&mut manifest, key, v);
            }
            let cfg = multi_config(k, a)?;
            let f = LawK::binomial_product(k, n, 0.5)?;
            let g = LawK::standard_normal(k)?;
            let omegas = vec![omega; k];
            let grid = esseen1d::linspace(-3.0, 3.0, if k == 3 { 7 } else { 13 });
            let (d, at) = em::sup_distance_k(&f, &g, &grid)?;
            measurements.push(measurement("sup_distance", d, 1e-15));
            let plain = em::esseen_bound_k(&f, &g, &omegas, &at, &cfg)?;
            verdicts.push(verdict(
                "plain bound >= discrepancy at the maximizing point",
                plain.total >= d,
                format!("{:.6} vs {d:.6} at {at:?}", plain.total),
            ));
            if k == 1 {
                let f1 = Distribution1D::binomial_standardized(n, 0.5)?;
                let one = esseen1d::esseen_bound_1d(&f1, &normal, omega, &esseen_config(a)?)?;
                let same_tail = (one.tail_term * cfg.constants.c2 / one.c2 - plain.tail_term).abs()
                    <= 1e-12 * plain.tail_term.max(1.0);
                verdicts.push(verdict(
                    "k = 1 matches the one-dimensional structure",
                    same_tail && one.total >= d,
                    format!(
                        "tail terms {:.6} / {:.6}, one-dimensional total {:.6}",
                        plain.tail_term, one.tail_term, one.total
                    ),
                ));
                bounds.push(to_value(&one));
            }
            bounds.push(to_value(&plain));
            let ta = em::esseen_bound_truncated(
                &f,
                &g,
                &omegas,
                &TruncationMap::variant_a(delta),
                &TruncatedMode::A,
                &cfg,
            )?;
            verdicts.push(verdict(
                "truncated bound A >= sup distance",
                ta.total >= d,
                format!("{:.6} vs {d:.6}", ta.total),
            ));
            bounds.push(to_value(&ta));
            let side = (delta - 1.0).max(0.5);
            let (lo, hi) = (vec![-0.5 * side; k], vec![0.5 * side; k]);
            let tb = em::esseen_bound_truncated(
                &f,
                &g,
                &omegas,
                &TruncationMap::variant_b(side),
                &TruncatedMode::B {
                    a: lo.clone(),
                    b: hi.clone(),
                },
                &cfg,
            )?;
            let box_gap = (f.box_measure(&lo, &hi) - g.box_measure(&lo, &hi)).abs();
            measurements.push(measurement("box_discrepancy", box_gap, 1e-15));
            verdicts.push(verdict(
                "truncated bound B >= box discrepancy",
                tb.total >= box_gap,
                format!("{:.6} vs {box_gap:.6}", tb.total),
            ));
            bounds.push(to_value(&tb));
            if k <= 2 && omega > 1.0 {
                let sl = em::esseen_bound_slab(&f, &g, &omegas, &cfg)?;
                verdicts.push(verdict(
                    "slab bound >= sup distance",
                    sl.total >= d,
                    format!("{:.6} vs {d:.6}", sl.total),
                ));
                bounds.push(to_value(&sl));
            }
        }
        Scenario::CltHaar => {
            let n = a.big_n.unwrap_or(400);
            param(&mut manifest, "N", json!(n));
            param(&mut manifest, "samples", json!(a.samples));
            manifest.seed = Some(a.seed);
            manifest.tolerances.insert("ks".into(), 0.01);
            let law = clt::haar_circle_law();
            let ones = CoefficientScheme::ones();
            let g1 = clt::gaussian_limit_gap(&law, &ones, n, &[Complex64::new(1.0, 0.0)], 1.0)?;
            verdicts.push(verdict(
                "gap <= proof bound at xi = 1",
                g1.admissible && g1.holds(),
                format!("{:.3e} <= {:.6}", g1.gap, g1.bound),
            ));
            bounds.push(to_value(&g1));
            let mut worst = f64::NEG_INFINITY;
            for i in 0..20 {
                let r = (i + 1) as f64 / 20.0;
                let xi = Complex64::from_polar(r, 0.7 * i as f64);
                let g = clt::gaussian_limit_gap(&law, &ones, n, &[xi], 1.0)?;
                worst = worst.max(if g.admissible {
                    g.gap - g.bound
                } else {
                    f64::INFINITY
                });
            }
            verdicts.push(verdict(
                "gap <= proof bound at 20 points of the unit disk",
                worst <= 0.0,
                format!("largest gap - bound {worst:.3e}"),
            ));
            monte_carlo(&law, &ones, n, a, &mut measurements, &mut verdicts)?;
        }
        Scenario::CltVector => {
            let n = a.big_n.unwrap_or(1000);
            param(&mut manifest, "N", json!(n));
            param(&mut manifest, "samples", json!(a.samples));
            manifest.seed = Some(a.seed);
            manifest.tolerances.insert("ks".into(), 0.01);
            let law = clt::haar_circle_law();
            let alt = CoefficientScheme::alternating_pair();
            let st = clt::lyapunov_normalizer(&alt, n)?;
            measurements.push(measurement(
                "matrix_residual",
                st.matrix_residual.unwrap_or(f64::NAN),
                1e-15,
            ));
            measurements.push(measurement("lyapunov_sum", st.lyapunov_sum, 1e-15));
            let mut worst = f64::NEG_INFINITY;
            let mut reports = Vec::new();
            for i in 0..20 {
                let xi = [
                    Complex64::from_polar((i + 1) as f64 / 20.0, 0.3 * i as f64),
                    Complex64::from_polar(1.0 - i as f64 / 20.0, -1.1 * i as f64),
                ];
                let g = clt::gaussian_limit_gap(&law, &alt, n, &xi, 1.0)?;
                worst = worst.max(if g.admissible {
                    g.gap - g.bound
                } else {
                    f64::INFINITY
                });
                if i == 0 {
                    reports.push(to_value(&g));
                }
            }
            verdicts.push(verdict(
                "gap <= proof bound at 20 points of the polydisk",
                worst <= 0.0,
                format!("largest gap - bound {worst:.3e}"),
            ));
            bounds.extend(reports);
            monte_carlo(&law, &alt, n, a, &mut measurements, &mut verdicts)?;
        }
    }
    Ok(Report {
        manifest,
        checks: vec![],
        bounds,
        measurements,
        verdicts,
        runtime_ms: None,
    })
}

fn monte_carlo(
    law: &clt::ComplexLawSpec,
    scheme: &CoefficientScheme,
    n: usize,
    a: &DemoArgs,
    measurements: &mut Vec<Measurement>,
    verdicts: &mut Vec<Verdict>,
) -> Result<()> {
    let mc = MonteCarloConfig {
        seed: a.seed,
        samples: a.samples,
    };
    let v = clt::vector_statistic(law, scheme, n, mc, &esseen1d::linspace(-1.5, 1.5, 7))?;
    let noise = 1.36 / (a.samples as f64).sqrt();
    let mut ks_max: f64 = 0.0;
    for (j, (re, im)) in v.ks.iter().enumerate() {
        measurements.push(measurement(format!("ks_re[{j}]"), *re, noise));
        measurements.push(measurement(format!("ks_im[{j}]"), *im, noise));
        measurements.push(measurement(
            format!("rectangle_gap[{j}]"),
            v.rectangle_gap[j],
            noise,
        ));
        ks_max = ks_max.max(*re).max(*im);
    }
    verdicts.push(Verdict {
        name: "KS of every marginal <= 0.01".into(),
        asserted: false,
        passed: ks_max <= 0.01,
        detail: format!("largest KS {ks_max:.5}; empirical threshold"),
    });
    let dim = scheme.dim();
    let mut worst_z: f64 = 0.0;
    for (i, e) in v.covariance.iter().enumerate() {
        let target = v.covariance_target[i];
        measurements.push(measurement(
            format!("covariance[{},{}]", i / dim, i % dim),
            e.value.0,
            e.std_error,
        ));
        let dev = (Complex64::new(e.value.0, e.value.1) - target).norm();
        worst_z = worst_z.max(if e.std_error > 0.0 {
            dev / e.std_error
        } else if dev > 1e-12 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    verdicts.push(Verdict {
        name: "covariance within 4 standard errors".into(),
        asserted: false,
        passed: worst_z <= 4.0,
        detail: format!("largest deviation {worst_z:.2} standard errors"),
    });
    Ok(())
}
