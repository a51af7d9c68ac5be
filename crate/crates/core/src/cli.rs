//! Command-line front end. Every command resolves its parameters (flags,
//! then the JSON config file, then defaults) into a validated [`JobSpec`]
//! before any computation starts.

use crate::catalog;
use crate::dgroup::{self, DGroupContext};
use crate::error::{Error, Result};
use crate::heat::{self, BlockCache, BracketEnd, Group, HeatConfig, HeatMode, NSReport};
use crate::heisenberg::HeisenbergContext;
use crate::report::{self, fmt_f64, opt_cell};
use crate::verify::{self, Suite, SuiteParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "nilspec", version, about = "Laplacian spectra and heat-trace exponents on Heisenberg-type groups")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON file of parameter defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Block spectra of the Heisenberg Laplacian matched against the catalog.
    Spectrum(SpectrumArgs),
    /// Run a named property suite; exits 1 if any asserted check fails.
    Verify(VerifyArgs),
    /// Heat trace and fitted decay exponent.
    Ns(NsArgs),
    /// Lowest 1-form eigenvalue of the D group with bracket and certificates.
    Dgroup(DGroupArgs),
    /// Run a command over the parameter grid of the config file.
    Sweep,
}

#[derive(Args, Debug, Default)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<i32>,
    /// Catalog match tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<i32>,
}

#[derive(Args, Debug, Default)]
pub struct NsArgs {
    /// heisenberg or dgroup.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// lowest_band or full_trace (Heisenberg only).
    #[arg(long)]
    pub mode: Option<String>,
    /// lower, upper or midpoint (D group, degree 1).
    #[arg(long)]
    pub bracket: Option<String>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct DGroupArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: Option<f64>,
    /// Truncation level |β| ≤ max_total.
    #[arg(long)]
    pub max_total: Option<u32>,
    /// Number of low eigenvalues listed.
    #[arg(long)]
    pub count: Option<usize>,
}

/// A fully resolved and validated job.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum JobSpec {
    Spectrum { n: usize, p: usize, k: f64, gamma_max: i32, tol: f64 },
    Verify { suite: Suite, params: SuiteParams },
    Ns { group: Group, p: usize, bracket: Option<BracketEnd>, heat: HeatConfig },
    Dgroup { n: usize, lambda: [f64; 2], max_total: u32, count: usize },
}

/// Result of one job, ready for either output format.
pub struct JobOutput {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failed: bool,
}

fn pick<T: DeserializeOwned>(flag: Option<T>, cfg: &Map<String, Value>, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    let v = cfg.get(key).or_else(|| cfg.get(&key.replace('_', "-")));
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| Error::Input(format!("config key {key:?}: {e}"))),
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("missing required parameter --{}", key.replace('_', "-"))))
}

fn resolve_spectrum(a: &SpectrumArgs, cfg: &Map<String, Value>) -> Result<JobSpec> {
    let n = required(pick(a.n, cfg, "n")?, "n")?;
    let p = required(pick(a.p, cfg, "p")?, "p")?;
    let k = required(pick(a.k, cfg, "k")?, "k")?;
    let gamma_max = pick(a.gamma_max, cfg, "gamma_max")?.unwrap_or(4);
    let tol = pick(a.tol, cfg, "tol")?.unwrap_or(1e-8);
    HeisenbergContext::new(n, k, p)?;
    if !(0..=16).contains(&gamma_max) {
        return Err(Error::Precondition(format!("gamma-max must be in 0..=16, got {gamma_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tol must be positive, got {tol}")));
    }
    Ok(JobSpec::Spectrum { n, p, k, gamma_max, tol })
}

fn resolve_verify(a: &VerifyArgs, cfg: &Map<String, Value>) -> Result<JobSpec> {
    let suite: Suite = required(pick(a.suite.clone(), cfg, "suite")?, "suite")?.parse()?;
    let params = SuiteParams {
        n: pick(a.n, cfg, "n")?,
        p: pick(a.p, cfg, "p")?,
        k: pick(a.k, cfg, "k")?,
        gamma_max: pick(a.gamma_max, cfg, "gamma_max")?,
    };
    if params.p.is_some() && params.n.is_none() {
        return Err(Error::Input("--p requires --n".into()));
    }
    Ok(JobSpec::Verify { suite, params })
}

fn resolve_ns(a: &NsArgs, cfg: &Map<String, Value>) -> Result<JobSpec> {
    let group_name: String = required(pick(a.group.clone(), cfg, "group")?, "group")?;
    let n: usize = required(pick(a.n, cfg, "n")?, "n")?;
    let p: usize = required(pick(a.p, cfg, "p")?, "p")?;
    let group = match group_name.as_str() {
        "heisenberg" => Group::Heisenberg(n),
        "dgroup" => Group::DGroup(n),
        other => return Err(Error::Input(format!("unknown group {other:?} (heisenberg or dgroup)"))),
    };
    heat::alpha_closed_form(group, p)?;
    let defaults = HeatConfig::default();
    let mode = match pick(a.mode.clone(), cfg, "mode")? {
        Some(m) => m.parse()?,
        None => HeatMode::LowestBand,
    };
    if matches!(group, Group::DGroup(_)) && mode == HeatMode::FullTrace {
        return Err(Error::Input("full_trace mode is available for the Heisenberg group only".into()));
    }
    let bracket = match pick(a.bracket.clone(), cfg, "bracket")? {
        Some(b) => Some(b.parse()?),
        None => None,
    };
    let t_min = pick(a.t_min, cfg, "t_min")?.unwrap_or(1e2);
    let t_max = pick(a.t_max, cfg, "t_max")?.unwrap_or(1e5);
    let t_points = pick(a.t_points, cfg, "t_points")?.unwrap_or(25);
    if !(t_min > 0.0 && t_max > t_min) || t_points < 10 {
        return Err(Error::Precondition("need 0 < t-min < t-max and t-points >= 10".into()));
    }
    let heat = HeatConfig {
        t_grid: heat::log_grid(t_min, t_max, t_points),
        quad_tol: pick(a.quad_tol, cfg, "quad_tol")?.unwrap_or(defaults.quad_tol),
        tail_tol: pick(a.tail_tol, cfg, "tail_tol")?.unwrap_or(defaults.tail_tol),
        mode,
        max_shells: defaults.max_shells,
    };
    heat.validate()?;
    Ok(JobSpec::Ns { group, p, bracket, heat })
}

fn resolve_dgroup(a: &DGroupArgs, cfg: &Map<String, Value>) -> Result<JobSpec> {
    let n = required(pick(a.n, cfg, "n")?, "n")?;
    let lambda = [pick(a.lambda1, cfg, "lambda1")?.unwrap_or(1.0), pick(a.lambda2, cfg, "lambda2")?.unwrap_or(0.0)];
    let max_total = pick(a.max_total, cfg, "max_total")?.unwrap_or(4);
    let count = pick(a.count, cfg, "count")?.unwrap_or(8);
    DGroupContext::new(n, lambda)?;
    if !(3..=8).contains(&max_total) {
        return Err(Error::Precondition(format!("max-total must be in 3..=8, got {max_total}")));
    }
    if n > 3 {
        return Err(Error::Precondition(format!("truncated D-group spectra are limited to n <= 3, got {n}")));
    }
    Ok(JobSpec::Dgroup { n, lambda, max_total, count })
}

fn resolve(command: &Command, cfg: &Map<String, Value>) -> Result<JobSpec> {
    match command {
        Command::Spectrum(a) => resolve_spectrum(a, cfg),
        Command::Verify(a) => resolve_verify(a, cfg),
        Command::Ns(a) => resolve_ns(a, cfg),
        Command::Dgroup(a) => resolve_dgroup(a, cfg),
        Command::Sweep => Err(Error::Input("sweep is resolved from the config grid".into())),
    }
}

fn command_named(name: &str) -> Result<Command> {
    Ok(match name {
        "spectrum" => Command::Spectrum(SpectrumArgs::default()),
        "verify" => Command::Verify(VerifyArgs::default()),
        "ns" => Command::Ns(NsArgs::default()),
        "dgroup" => Command::Dgroup(DGroupArgs::default()),
        other => return Err(Error::Input(format!("sweep command must be spectrum, verify, ns or dgroup, got {other:?}"))),
    })
}

/// Expands the config's "grid" object (key → list of values) into one
/// parameter map per combination, keys varying in sorted order with the
/// last key fastest.
pub fn expand_grid(cfg: &Map<String, Value>) -> Result<Vec<Map<String, Value>>> {
    let grid = match cfg.get("grid") {
        Some(Value::Object(g)) => g.clone(),
        _ => return Err(Error::Input("sweep config needs a \"grid\" object of parameter lists".into())),
    };
    let mut combos = vec![Map::new()];
    for (key, values) in &grid {
        let values = values
            .as_array()
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::Input(format!("grid entry {key:?} must be a non-empty list")))?;
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.insert(key.clone(), v.clone());
                    c
                })
            })
            .collect();
    }
    Ok(combos)
}

fn run_spectrum(n: usize, p: usize, k: f64, gamma_max: i32, tol: f64) -> Result<JobOutput> {
    let ctx = HeisenbergContext::new(n, k, p)?;
    let spectra = ctx.sweep(gamma_max)?;
    let coverage = catalog::match_spectrum(&spectra, n, p, k, gamma_max, tol)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for r in &coverage.rows {
        let gamma = r.gamma.as_ref().map(|g| g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")).unwrap_or_default();
        let family = r.provenance.map(|pr| pr.family);
        let g = r.provenance.and_then(|pr| pr.g);
        let rr = r.provenance.and_then(|pr| pr.r);
        rows.push(vec![gamma, fmt_f64(r.eigenvalue), fmt_f64(r.residual), opt_cell(family), opt_cell(g), opt_cell(rr)]);
        json_rows.push(json!({
            "gamma": r.gamma, "eigenvalue": r.eigenvalue, "residual": r.residual,
            "catalog_family": family, "catalog_g": g, "catalog_r": rr,
        }));
    }
    let (lowest, mult) = catalog::lowest(n, p, k)?;
    let json = json!({
        "config": {"n": n, "p": p, "k": k, "gamma_max": gamma_max, "tol": tol},
        "rows": json_rows,
        "numeric_orphans": coverage.numeric_orphans.len(),
        "catalog_orphans": coverage.catalog_orphans.iter().map(|c| c.value).collect::<Vec<_>>(),
        "clean": coverage.is_clean(),
        "catalog_lowest": {"value": lowest, "multiplicity": mult},
    });
    Ok(JobOutput {
        json,
        header: vec!["gamma", "eigenvalue", "residual", "catalog_family", "catalog_g", "catalog_r"],
        rows,
        failed: false,
    })
}

fn run_verify(suite: Suite, params: &SuiteParams) -> Result<JobOutput> {
    let r = verify::run_suite(suite, params)?;
    let rows = r
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), fmt_f64(c.value), fmt_f64(c.threshold), c.passed.to_string(), c.asserted.to_string()])
        .collect();
    Ok(JobOutput {
        json: json!({"suite": suite, "params": report::to_value(params)?, "passed": r.passed, "checks": report::to_value(&r.checks)?}),
        header: vec!["check", "value", "threshold", "passed", "asserted"],
        rows,
        failed: !r.passed,
    })
}

fn ns_json(r: &NSReport, heat_cfg: &HeatConfig, extra: Value) -> Result<Value> {
    let (kind, n) = match r.group {
        Group::Heisenberg(n) => ("heisenberg", n),
        Group::DGroup(n) => ("dgroup", n),
    };
    let grid = &heat_cfg.t_grid;
    let e = &r.estimate;
    let mut v = json!({
        "alpha_hat": e.alpha_hat,
        "stderr": e.stderr,
        "alpha_closed": e.alpha_closed,
        "alpha_closed_label": e.alpha_closed_label,
        "relative_error": e.relative_error,
        "residual_rms": e.residual_rms,
        "window": {"t_min": e.window_t_min, "t_max": e.window_t_max, "points": e.window_points},
        "config": {
            "group": kind, "n": n, "p": r.p, "mode": r.mode, "bracket": r.bracket_end,
            "t_min": grid[0], "t_max": grid[grid.len() - 1], "t_points": grid.len(),
            "quad_tol": heat_cfg.quad_tol, "tail_tol": heat_cfg.tail_tol,
        },
    });
    if let (Value::Object(m), Value::Object(x)) = (&mut v, extra) {
        m.extend(x);
    }
    Ok(v)
}

fn run_ns(group: Group, p: usize, bracket: Option<BracketEnd>, cfg: &HeatConfig) -> Result<JobOutput> {
    let (r, extra) = match group {
        Group::Heisenberg(n) => (heat::ns_heisenberg(n, p, cfg, &BlockCache::new())?, json!({})),
        Group::DGroup(n) => {
            let r = heat::ns_dgroup(n, p, bracket.unwrap_or(BracketEnd::Midpoint), cfg)?;
            let extra = if p == 1 {
                let lo = heat::ns_dgroup(n, p, BracketEnd::Lower, cfg)?.estimate.alpha_hat;
                let hi = heat::ns_dgroup(n, p, BracketEnd::Upper, cfg)?.estimate.alpha_hat;
                json!({"bracket_fits": {"lower": lo, "upper": hi}})
            } else {
                json!({})
            };
            (r, extra)
        }
    };
    let rows = r
        .samples
        .iter()
        .map(|s| vec![fmt_f64(s.t), fmt_f64(s.theta), s.local_slope.map(fmt_f64).unwrap_or_default()])
        .collect();
    Ok(JobOutput {
        json: ns_json(&r, cfg, extra)?,
        header: vec!["t", "theta", "local_slope"],
        rows,
        failed: false,
    })
}

fn run_dgroup(n: usize, lambda: [f64; 2], max_total: u32, count: usize) -> Result<JobOutput> {
    let ctx = DGroupContext::new(n, lambda)?;
    let low = ctx.lowest_report(max_total)?;
    let spectrum = ctx.truncated_lowest(max_total, count)?;
    let certs: Vec<_> = (1..=3).map(|b| dgroup::cubic_bounds(b, n, ctx.r())).collect::<Result<_>>()?;
    let sector = |s: &[i32]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
    let rows = spectrum.iter().map(|(v, s)| vec![fmt_f64(*v), sector(s)]).collect();
    let json = json!({
        "config": {"n": n, "lambda": lambda, "max_total": max_total, "count": count},
        "lowest": report::to_value(&low)?,
        "cubic_bounds": report::to_value(&certs)?,
        "spectrum": spectrum.iter().map(|(v, s)| json!({"eigenvalue": v, "sector": s})).collect::<Vec<_>>(),
    });
    Ok(JobOutput { json, header: vec!["eigenvalue", "sector"], rows, failed: false })
}

pub fn execute(job: &JobSpec) -> Result<JobOutput> {
    match job {
        JobSpec::Spectrum { n, p, k, gamma_max, tol } => run_spectrum(*n, *p, *k, *gamma_max, *tol),
        JobSpec::Verify { suite, params } => run_verify(*suite, params),
        JobSpec::Ns { group, p, bracket, heat } => run_ns(*group, *p, *bracket, heat),
        JobSpec::Dgroup { n, lambda, max_total, count } => run_dgroup(*n, *lambda, *max_total, *count),
    }
}

fn render(out: JobOutput, format: Format) -> Result<(String, bool)> {
    let text = match format {
        Format::Json => report::to_json(&out.json)?,
        Format::Csv => report::to_csv(&out.header, &out.rows)?,
    };
    Ok((text, out.failed))
}

fn run_sweep(cfg: &Map<String, Value>, format: Format) -> Result<(String, bool)> {
    let name: String = required(pick(None, cfg, "command")?, "command")?;
    let template = command_named(&name)?;
    let combos = expand_grid(cfg)?;
    let keys: Vec<String> = cfg["grid"].as_object().map(|g| g.keys().cloned().collect()).unwrap_or_default();
    // Resolve every combination before running any of them.
    let jobs: Vec<(Map<String, Value>, JobSpec)> = combos
        .into_iter()
        .map(|c| {
            let mut merged = cfg.clone();
            merged.extend(c.clone());
            resolve(&template, &merged).map(|j| (c, j))
        })
        .collect::<Result<_>>()?;
    let mut failed = false;
    let mut runs = Vec::new();
    let mut header: Vec<String> = keys.clone();
    let mut rows = Vec::new();
    for (i, (params, job)) in jobs.iter().enumerate() {
        let out = execute(job)?;
        failed |= out.failed;
        if i == 0 {
            header.extend(out.header.iter().map(|s| s.to_string()));
        }
        let prefix: Vec<String> = keys.iter().map(|k| cell(&params[k])).collect();
        for r in &out.rows {
            rows.push(prefix.iter().cloned().chain(r.iter().cloned()).collect());
        }
        runs.push(json!({"params": params, "result": out.json}));
    }
    let text = match format {
        Format::Json => report::to_json(&json!({"command": name, "runs": runs}))?,
        Format::Csv => {
            let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            report::to_csv(&h, &rows)?
        }
    };
    Ok((text, failed))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| Error::Input(format!("config {}: {e}", path.display())))? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Input("config file must hold a JSON object".into())),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Precondition(_) | Error::IndexOutOfRange { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}

fn diagnostic(err: &mut dyn Write, kind: &str, message: &str) {
    let one_line = message.split_whitespace().collect::<Vec<_>>().join(" ");
    let _ = writeln!(err, "error: kind={kind} message={one_line}");
}

fn run_cli(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let cfg = load_config(&cli.config)?;
    let format = match cli.format {
        Some(f) => f,
        None => pick(None, &cfg, "format")?.unwrap_or(Format::Json),
    };
    let output: Option<PathBuf> = match cli.output {
        Some(o) => Some(o),
        None => pick(None, &cfg, "output")?,
    };
    let workers: Option<usize> = pick(cli.workers, &cfg, "workers")?;
    if workers == Some(0) {
        return Err(Error::Input("--workers must be at least 1".into()));
    }
    let job = match &cli.command {
        Command::Sweep => None,
        c => Some(resolve(c, &cfg)?),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    let (text, failed) = pool.install(|| match &job {
        Some(job) => render(execute(job)?, format),
        None => run_sweep(&cfg, format),
    })?;
    report::emit(&text, output.as_deref(), out)?;
    Ok(failed)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code: 0 success, 1 suite or computation failure, 2 bad
/// arguments. Diagnostics go to `err` as one line each.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{e}");
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            diagnostic(err, "argument", first);
            return 2;
        }
    };
    match run_cli(cli, out) {
        Ok(false) => 0,
        Ok(true) => {
            diagnostic(err, "suite_failure", "one or more asserted checks failed");
            1
        }
        Err(e) => {
            diagnostic(err, e.kind(), &e.to_string());
            exit_code(&e)
        }
    }
}
