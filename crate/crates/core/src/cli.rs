//! Command-line front end: `causet coeffs | sprinkle | boxop | action | verify`.
//!
//! Every output carries the run configuration and the toolkit version. Exit
//! codes: 0 success, 1 a verification outside tolerance, 2 a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coefficients::coefficient_set;
use crate::continuum::{check_alpha_over_beta, check_beta, check_ricci, default_ladder, ConvergenceReport};
use crate::dalembertian::{ensemble_mean_b, interval_histogram, sprinkle_action, FieldSpec};
use crate::error::Error;
use crate::exact::ExactScalar;
use crate::hypergeom::EvalConfig;
use crate::real::Real;
use crate::sprinkling::{sprinkle, CausalMatrix, DiamondSpec, Sprinkle};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerances used by `verify`.
pub const BETA_TOLERANCE: f64 = 0.05;
pub const RICCI_TOLERANCE: f64 = 0.05;
pub const I00_FRACTION: f64 = 1e-2;

#[derive(Parser, Debug)]
#[command(name = "causet", version, about = "Causal-set d'Alembertian toolkit")]
pub struct Cli {
    /// Worker threads (falls back to CAUSET_THREADS, then all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Leave out the timestamp so identical runs give identical bytes
    #[arg(long, global = true)]
    pub no_meta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact α_d, β_d, C_i, ζ_d and friends
    Coeffs(CoeffsArgs),
    /// Poisson-sprinkle a causal diamond to a file
    Sprinkle(SprinkleArgs),
    /// Ensemble mean of B^(d)φ at the diamond tip against □φ
    Boxop(BoxopArgs),
    /// Action of a sprinkled causal set
    Action(ActionArgs),
    /// Large-z convergence of the continuum integrals
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Json,
    Bin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Beta,
    AlphaBeta,
    Ricci,
}

#[derive(Args, Debug, Serialize)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub dim: i64,
    /// l/l_p as an integer or fraction
    #[arg(long, default_value = "1")]
    pub ratio: String,
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SprinkleArgs {
    #[arg(long)]
    pub dim: i64,
    #[arg(long)]
    pub tau: f64,
    /// Density; or give --count for the expected number of elements
    #[arg(long, required_unless_present = "count", conflicts_with = "count")]
    pub rho: Option<f64>,
    #[arg(long)]
    pub count: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    /// Run index, selecting the random stream
    #[arg(long, default_value_t = 0)]
    pub run: u64,
    /// Do not add the future tip
    #[arg(long)]
    pub no_top: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Json)]
    pub format: FileFormat,
}

#[derive(Args, Debug, Serialize)]
pub struct BoxopArgs {
    #[arg(long)]
    pub dim: i64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    /// e.g. "1*t^2 + window(0.5,1)"
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value = "1")]
    pub ratio: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ActionArgs {
    /// Sprinkle file, JSON or CSET1 binary
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub dim: i64,
    #[arg(long, default_value = "1")]
    pub ratio: String,
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub identity: Identity,
    #[arg(long)]
    pub dim: i64,
    /// Largest ladder point; defaults to the end of the standard ladder
    #[arg(long)]
    pub zmax: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What each output echoes back.
#[derive(Serialize, Debug)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub params: Value,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CAUSET_THREADS") {
            Ok(v) if !v.trim().is_empty() => {
                Some(v.trim().parse::<usize>().map_err(|_| format!("CAUSET_THREADS={v} is not a count"))?)
            }
            _ => None,
        },
    };
    if n == Some(0) {
        return Err("thread count must be at least 1".into());
    }
    Ok(n)
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Coeffs(a) => coeffs(a, cli.no_meta),
        Command::Sprinkle(a) => sprinkle_cmd(a, cli.no_meta),
        Command::Boxop(a) => boxop(a, cli.no_meta),
        Command::Action(a) => action_cmd(a, cli.no_meta),
        Command::Verify(a) => verify(a, cli.no_meta),
    }
}

fn dim(d: i64) -> CliResult<u32> {
    if d < 2 || d > u32::MAX as i64 {
        return Err(Error::Dimension(d).into());
    }
    Ok(d as u32)
}

fn ratio(s: &str) -> CliResult<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Failure::Usage(format!("--ratio '{s}' is not an integer or fraction")))
}

fn exact_pair(x: &ExactScalar, digits: u32) -> Value {
    json!({ "exact": x.to_string(), "approx": x.to_decimal(digits) })
}

fn envelope<A: Serialize>(subcommand: &'static str, args: &A, no_meta: bool, body: Value) -> Value {
    let config = RunConfig { subcommand, params: serde_json::to_value(args).unwrap_or(Value::Null) };
    let mut out = json!({ "version": VERSION, "config": config });
    if !no_meta {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out["meta"] = json!({ "unix_time": secs });
    }
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes()).and_then(|_| o.flush()).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// CSV has no room for the configuration, so it goes in a comment line.
fn csv_text<A: Serialize>(subcommand: &'static str, args: &A, rows: &[Vec<String>]) -> String {
    let config = RunConfig { subcommand, params: serde_json::to_value(args).unwrap_or(Value::Null) };
    let mut s = format!("# causet {VERSION} {}\n", serde_json::to_string(&config).expect("serializable"));
    for r in rows {
        s += &r.join(",");
        s.push('\n');
    }
    s
}

fn coeffs(a: &CoeffsArgs, no_meta: bool) -> CliResult<()> {
    let d = dim(a.dim)?;
    let c = coefficient_set(d, &ratio(&a.ratio)?)?;
    let p = a.digits;
    let cs: Vec<String> = c.layer_coefficients.iter().map(|q| q.to_string()).collect();
    let named = [
        ("c_d", &c.c_d),
        ("alpha", &c.alpha),
        ("beta", &c.beta),
        ("zeta", &c.zeta),
    ];
    let ba = c.beta_over_alpha();
    let text = match a.format {
        Format::Json => {
            let mut body = json!({
                "dim": d,
                "n_d": c.n_d,
                "C": cs,
                "beta_over_alpha": exact_pair(&ba, p),
                "l_over_lp": c.l_over_lp.to_string(),
                "ricci_prefactor": c.ricci_prefactor.to_string(),
            });
            for (k, v) in named {
                body[k] = exact_pair(v, p);
            }
            json_text(&envelope("coeffs", a, no_meta, body))
        }
        Format::Csv => {
            let mut rows = vec![vec!["name".into(), "exact".into(), "approx".into()]];
            for (k, v) in named.iter().copied().chain([("beta_over_alpha", &ba)]) {
                rows.push(vec![k.into(), format!("\"{v}\""), v.to_decimal(p)]);
            }
            for (i, q) in c.layer_coefficients.iter().enumerate() {
                rows.push(vec![format!("C_{}", i + 1), q.to_string(), Real::from_ratio(q, 64).to_decimal(17)]);
            }
            csv_text("coeffs", a, &rows)
        }
        Format::Table => {
            let mut s = format!("d = {d}, n_d = {}, l/l_p = {}\n", c.n_d, c.l_over_lp);
            let rows: Vec<_> = named.iter().copied().chain([("beta/alpha", &ba)]).collect();
            let w = rows.iter().map(|(_, v)| v.to_string().len()).max().unwrap_or(0);
            for (k, v) in rows {
                s += &format!("{k:<12} {:<w$}  {}\n", v.to_string(), v.to_decimal(p));
            }
            for (i, q) in c.layer_coefficients.iter().enumerate() {
                s += &format!("{:<12} {q}\n", format!("C_{}", i + 1));
            }
            s
        }
    };
    emit(&a.out, &text)
}

fn sprinkle_cmd(a: &SprinkleArgs, no_meta: bool) -> CliResult<()> {
    let d = dim(a.dim)?;
    let mut spec = match (a.rho, a.count) {
        (Some(rho), _) => DiamondSpec::new(d, a.tau, rho)?,
        (None, Some(n)) => DiamondSpec::with_expected_count(d, a.tau, n)?,
        (None, None) => return Err(Failure::Usage("give --rho or --count".into())),
    };
    spec.include_top = !a.no_top;
    let s = sprinkle(&spec, a.seed, a.run)?;
    match a.format {
        FileFormat::Json => s.write_json(&a.out)?,
        FileFormat::Bin => s.write_bin(&a.out)?,
    }
    let body = json!({
        "file": a.out.display().to_string(),
        "elements": s.len(),
        "top_index": s.top_index,
        "volume": spec.volume(),
        "rho": spec.rho,
        "expected_elements": spec.expected_count(),
    });
    emit(&None, &json_text(&envelope("sprinkle", a, no_meta, body)))
}

fn boxop(a: &BoxopArgs, no_meta: bool) -> CliResult<()> {
    let d = dim(a.dim)?;
    let spec = DiamondSpec::new(d, a.tau, a.rho)?;
    let field = FieldSpec::parse(&a.field)?;
    let c = coefficient_set(d, &ratio(&a.ratio)?)?;
    let r = ensemble_mean_b(&spec, &field, &c, a.runs, a.seed)?;
    let text = match a.format {
        Format::Json | Format::Table => {
            let body = json!({ "ensemble": r, "deviation": r.deviation() });
            json_text(&envelope("boxop", a, no_meta, body))
        }
        Format::Csv => {
            let mut rows = vec![vec!["run".into(), "value".into()]];
            rows.extend(r.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]));
            rows.push(vec!["mean".into(), r.mean.to_string()]);
            rows.push(vec!["stderr".into(), r.stderr.to_string()]);
            rows.push(vec!["target".into(), r.target.to_string()]);
            csv_text("boxop", a, &rows)
        }
    };
    emit(&a.out, &text)
}

fn action_cmd(a: &ActionArgs, no_meta: bool) -> CliResult<()> {
    let d = dim(a.dim)?;
    let s = Sprinkle::read(&a.input).map_err(|e| Failure::Usage(format!("{}: {e}", a.input.display())))?;
    if s.dim != d {
        return Err(Failure::Usage(format!("--dim {d} but {} holds a d={} sprinkle", a.input.display(), s.dim)));
    }
    let c = coefficient_set(d, &ratio(&a.ratio)?)?;
    let m = CausalMatrix::new(&s);
    let h = interval_histogram(&m, c.n_d);
    let act = sprinkle_action(&c, &m)?;
    let text = match a.format {
        Format::Json | Format::Table => {
            let body = json!({
                "elements": s.len(),
                "relations": m.relation_count(),
                "abundances": h.counts,
                "deeper_intervals": h.overflow,
                "action": exact_pair(&act.exact, a.digits),
            });
            json_text(&envelope("action", a, no_meta, body))
        }
        Format::Csv => {
            let mut rows = vec![vec!["elements".into(), "action_exact".into(), "action_approx".into()]];
            rows.push(vec![s.len().to_string(), format!("\"{}\"", act.exact), act.exact.to_decimal(a.digits)]);
            csv_text("action", a, &rows)
        }
    };
    emit(&a.out, &text)
}

/// Standard ladder cut at `zmax`, which is appended when it is not a power
/// of ten already on it.
fn ladder_up_to(d: u32, zmax: Option<f64>) -> CliResult<Vec<BigRational>> {
    let mut ladder = default_ladder(d);
    if let Some(zm) = zmax {
        if !(zm > 0.0 && zm.is_finite()) {
            return Err(Failure::Usage(format!("--zmax must be positive, got {zm}")));
        }
        let top = BigRational::from_float(zm).ok_or_else(|| Failure::Usage("bad --zmax".into()))?;
        ladder.retain(|z| *z <= top);
        if ladder.last() != Some(&top) {
            ladder.push(top);
        }
    }
    Ok(ladder)
}

#[derive(Serialize)]
struct ReportOut {
    quantity: String,
    target: String,
    ladder: Vec<Value>,
    final_error: f64,
    decay_exponent: Option<f64>,
    predicted_decay: Option<f64>,
    asymptotic_limit: Option<f64>,
    monotone: bool,
    tolerance: f64,
    pass: bool,
}

fn report_out(r: &ConvergenceReport, digits: u32, tolerance: f64, pass: bool) -> ReportOut {
    ReportOut {
        quantity: r.quantity.clone(),
        target: r.target.to_decimal(digits),
        ladder: r
            .ladder
            .iter()
            .zip(&r.values)
            .zip(&r.errors)
            .map(|((z, v), e)| json!({ "z": z.to_string(), "value": v.to_decimal(digits), "error": e }))
            .collect(),
        final_error: r.final_error,
        decay_exponent: r.decay_exponent,
        predicted_decay: r.asymptotic.as_ref().and_then(|a| a.leading_decay),
        asymptotic_limit: r.asymptotic.as_ref().map(|a| a.limit),
        monotone: r.monotone,
        tolerance,
        pass,
    }
}

/// Pass/fail of one convergence report under the `verify` tolerances.
pub fn judge(r: &ConvergenceReport) -> (f64, bool) {
    match r.quantity.as_str() {
        "I_R" => {
            let abs = r.abs_errors.last().copied().unwrap_or(f64::NAN);
            (RICCI_TOLERANCE, abs < RICCI_TOLERANCE && r.monotone)
        }
        "I_00" => {
            let tol = I00_FRACTION * r.reference_scale.unwrap_or(0.0);
            (tol, r.final_error < tol && r.monotone)
        }
        _ => (BETA_TOLERANCE, r.final_error < BETA_TOLERANCE),
    }
}

fn verify(a: &VerifyArgs, no_meta: bool) -> CliResult<()> {
    let d = dim(a.dim)?;
    if a.digits < 10 {
        return Err(Failure::Usage("--digits must be at least 10".into()));
    }
    let ladder = ladder_up_to(d, a.zmax)?;
    let cfg = EvalConfig::with_digits(a.digits);
    let reports = match a.identity {
        Identity::Beta => vec![check_beta(d, &ladder, &cfg)?],
        Identity::AlphaBeta => vec![check_alpha_over_beta(d, &ladder, &cfg)?],
        Identity::Ricci => {
            let (ir, i00) = check_ricci(d, &ladder, &cfg)?;
            vec![ir, i00]
        }
    };
    let judged: Vec<(f64, bool)> = reports.iter().map(judge).collect();
    let pass = judged.iter().all(|j| j.1);
    let text = match a.format {
        Format::Json | Format::Table => {
            let outs: Vec<ReportOut> =
                reports.iter().zip(&judged).map(|(r, j)| report_out(r, a.digits, j.0, j.1)).collect();
            json_text(&envelope("verify", a, no_meta, json!({ "dim": d, "reports": outs, "pass": pass })))
        }
        Format::Csv => {
            let mut rows = vec![vec!["quantity".into(), "z".into(), "value".into(), "error".into()]];
            for r in &reports {
                for ((z, v), e) in r.ladder.iter().zip(&r.values).zip(&r.errors) {
                    rows.push(vec![r.quantity.clone(), z.to_string(), v.to_decimal(17), e.to_string()]);
                }
            }
            csv_text("verify", a, &rows)
        }
    };
    emit(&a.out, &text)?;
    if pass {
        Ok(())
    } else {
        let bad: Vec<String> = reports
            .iter()
            .zip(&judged)
            .filter(|(_, j)| !j.1)
            .map(|(r, j)| format!("{} final error {:.3e} (tolerance {:.3e}, monotone {})", r.quantity, r.final_error, j.0, r.monotone))
            .collect();
        Err(Failure::Verification(bad.join("; ")))
    }
}
