use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use malmquist::acceptance::{self, SuiteConfig};
use malmquist::bernstein::{run_trials, BernsteinConfig};
use malmquist::blaschke::parse_complex;
use malmquist::bounds::bound_report;
use malmquist::interpolator::{hermite_trace, phi, sup_norm_rep, trace_match};
use malmquist::oracle::{self, OracleConfig};
use malmquist::spaces::weighted_norm;
use malmquist::sweep::{run_sweep, SweepGrid, SweepRecord};
use malmquist::{Complex64, Sigma, SpaceSpec, TaylorSeries};

#[derive(Parser)]
#[command(name = "malmquist", version, about = "Constrained H-infinity interpolation on finite subsets of the disc")]
struct Cli {
    /// Master seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trace-match tolerance; also the oracle's convergence threshold scale.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "MALMQUIST_THREADS", default_value_t = 0)]
    threads: usize,
    /// Record wall-clock runtimes (otherwise runtime columns are 0).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build Phi(f) on the model space and check its trace.
    Interpolate(InterpolateArgs),
    /// Certified lower and upper bounds at one (n, r, X).
    Bounds(BoundsArgs),
    /// Minimal-norm oracle estimate of c(sigma, X, H^inf).
    Oracle(OracleArgs),
    /// Bound reports over a grid, with exponent fits.
    Sweep(SweepArgs),
    /// Monte-Carlo check of the model-space Bernstein inequalities.
    Bernstein(BernsteinArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InterpolateArgs {
    /// Shorthand `re+imi^mult;...`, a JSON array, or a file holding either.
    #[arg(long)]
    sigma: String,
    /// Taylor coefficients: JSON array (numbers or [re, im] pairs), comma list, or a file.
    #[arg(long)]
    f: String,
    /// `p,alpha`; p may be `inf`.
    #[arg(long, default_value = "2,0")]
    space: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value = "2,0")]
    space: String,
    /// Also run the oracle on the one-point multiset.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    sigma: String,
    #[arg(long, default_value = "2,0")]
    space: String,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    iters: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    p: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    oracle: Toggle,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Args)]
struct BernsteinArgs {
    /// Fixed n; random in 1..=10 when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    r: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k: Vec<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
}

/// Malformed input (exit 2) as opposed to numerical failure (exit 1).
#[derive(Debug)]
struct BadInput(String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    BadInput(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<BadInput>().is_some() {
        return 2;
    }
    match err.downcast_ref::<malmquist::Error>() {
        Some(malmquist::Error::NotConverged { .. } | malmquist::Error::Numerical(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn input_text(arg: &str) -> anyhow::Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return fs::read_to_string(path).with_context(|| format!("reading {arg}"));
    }
    Ok(arg.to_string())
}

fn parse_sigma(arg: &str) -> anyhow::Result<Sigma> {
    let text = input_text(arg)?;
    let text = text.trim();
    let sigma = if text.starts_with('[') { Sigma::from_json(text) } else { text.parse() };
    Ok(sigma?)
}

fn parse_series(arg: &str) -> anyhow::Result<TaylorSeries> {
    let text = input_text(arg)?;
    let text = text.trim();
    let coeffs: Vec<Complex64> = if text.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(format!("bad coefficient JSON: {e}")))?;
        let items = v.as_array().ok_or_else(|| bad("coefficients must be a JSON array"))?;
        items
            .iter()
            .map(|item| match item {
                serde_json::Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
                serde_json::Value::Array(pair) if pair.len() == 2 => {
                    let re = pair[0].as_f64().ok_or_else(|| bad("bad real part"))?;
                    let im = pair[1].as_f64().ok_or_else(|| bad("bad imaginary part"))?;
                    Ok(Complex64::new(re, im))
                }
                _ => Err(bad(format!("bad coefficient {item}"))),
            })
            .collect::<anyhow::Result<_>>()?
    } else {
        text.split(',').map(|t| parse_complex(t).map_err(anyhow::Error::from)).collect::<anyhow::Result<_>>()?
    };
    if coeffs.is_empty() {
        return Err(bad("no coefficients given"));
    }
    Ok(TaylorSeries::new(coeffs)?)
}

fn parse_p(s: &str) -> anyhow::Result<f64> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| bad(format!("bad exponent p = `{t}`"))),
    }
}

fn parse_space(s: &str) -> anyhow::Result<SpaceSpec> {
    let (p, a) = s.split_once(',').ok_or_else(|| bad(format!("space must be `p,alpha`, got `{s}`")))?;
    let alpha: f64 = a.trim().replace('\u{2212}', "-").parse().map_err(|_| bad(format!("bad alpha `{a}`")))?;
    Ok(SpaceSpec::new(parse_p(p)?, alpha)?)
}

fn pairs(c: &[Complex64]) -> Vec<[f64; 2]> {
    c.iter().map(|z| [z.re, z.im]).collect()
}

struct Output {
    sink: Box<dyn Write>,
}

impl Output {
    fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Self { sink })
    }

    fn json(&mut self, value: &impl Serialize) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut self.sink, value)?;
        writeln!(self.sink)?;
        Ok(())
    }

    fn rows<T: Serialize>(&mut self, format: Format, rows: &[T]) -> anyhow::Result<()> {
        match format {
            Format::Json => self.json(&rows),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.sink);
                for row in rows {
                    w.serialize(row)?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}

#[derive(Serialize)]
struct InterpolateOut {
    sigma: String,
    coords: Vec<[f64; 2]>,
    trace_defect: f64,
    trace_matched: bool,
    sup_norm: f64,
    sup_norm_grid: f64,
    norm_x: f64,
    ratio: Option<f64>,
}

fn cmd_interpolate(cli: &Cli, args: &InterpolateArgs, out: &mut Output) -> anyhow::Result<()> {
    let sigma = parse_sigma(&args.sigma)?;
    let f = parse_series(&args.f)?;
    let x = parse_space(&args.space)?;
    let g = phi(&f, &sigma);
    let tr = trace_match(&f, &g, &sigma, cli.tol);
    let sup = sup_norm_rep(&g);
    let norm_x = weighted_norm(&f, &x);
    out.json(&InterpolateOut {
        sigma: sigma.to_string(),
        coords: pairs(g.coords()),
        trace_defect: tr.max_defect,
        trace_matched: tr.matched,
        sup_norm: sup.refined,
        sup_norm_grid: sup.grid_max,
        norm_x,
        ratio: (norm_x > 0.0).then(|| sup.refined / norm_x),
    })
}

fn oracle_config(cli: &Cli, restarts: usize) -> OracleConfig {
    OracleConfig { restarts, seed: cli.seed, ..Default::default() }
}

fn cmd_bounds(cli: &Cli, args: &BoundsArgs, out: &mut Output) -> anyhow::Result<()> {
    let x = parse_space(&args.space)?;
    let cfg = oracle_config(cli, args.restarts);
    let start = std::time::Instant::now();
    let rep = bound_report(args.n, args.r, &x, args.oracle.then_some(&cfg))?;
    let ms = if cli.timing { start.elapsed().as_millis() } else { 0 };
    out.rows(cli.format, &[SweepRecord::from_report(&rep, ms)?])
}

#[derive(Serialize)]
struct OracleOut {
    value: f64,
    witness_coeffs: Vec<[f64; 2]>,
    route: String,
    crosscheck_delta: f64,
    crosscheck_route: &'static str,
    degree: usize,
    sensitivity: Option<f64>,
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs, out: &mut Output) -> anyhow::Result<()> {
    let sigma = parse_sigma(&args.sigma)?;
    let x = parse_space(&args.space)?;
    let cfg = OracleConfig { iters: args.iters, ..oracle_config(cli, args.restarts) };
    let est = oracle::interp_constant_estimate(&sigma, &x, &cfg)?;
    let trace = hermite_trace(&est.witness, &sigma);
    let (other, crosscheck_route) = if sigma.is_simple() {
        (oracle::pick_min_norm(&sigma, &trace)?, "pick bisection")
    } else {
        (oracle::min_norm(&sigma, &trace)?.value, "newton form on compressed shift")
    };
    out.json(&OracleOut {
        value: est.value,
        witness_coeffs: pairs(est.witness.coeffs()),
        route: format!("alternating maximization on compressed shift ({})", est.start),
        crosscheck_delta: (other - est.value).abs(),
        crosscheck_route,
        degree: est.degree,
        sensitivity: est.sensitivity,
    })
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs, out: &mut Output) -> anyhow::Result<()> {
    let ps = args.p.iter().map(|p| parse_p(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let grid = SweepGrid {
        ns: args.n.clone(),
        rs: args.r.clone(),
        ps,
        alphas: args.alpha.clone(),
        oracle: (args.oracle == Toggle::On).then(|| oracle_config(cli, args.restarts)),
        timing: cli.timing,
    };
    let (rows, fits) = run_sweep(&grid)?;
    match cli.format {
        Format::Json => out.json(&serde_json::json!({ "rows": rows, "fits": fits })),
        Format::Csv => {
            out.rows(Format::Csv, &rows)?;
            for fit in &fits {
                writeln!(
                    out.sink,
                    "# fit p={} alpha={} exponent={:.6} expected={} points={}",
                    fit.p, fit.alpha, fit.exponent, fit.expected, fit.points
                )?;
            }
            Ok(())
        }
    }
}

fn cmd_bernstein(cli: &Cli, args: &BernsteinArgs, out: &mut Output) -> anyhow::Result<()> {
    if args.n == Some(0) {
        return Err(bad("n must be at least 1"));
    }
    if !(0.0..1.0).contains(&args.r) {
        return Err(bad(format!("r = {} must lie in [0, 1)", args.r)));
    }
    let cfg = BernsteinConfig {
        n: args.n,
        r: args.r,
        trials: args.trials,
        orders: args.k.clone(),
        seed: cli.seed,
        ..Default::default()
    };
    out.rows(cli.format, &run_trials(&cfg)?)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, out: &mut Output) -> anyhow::Result<bool> {
    let cfg = SuiteConfig { seed: cli.seed, quick: args.quick };
    let mut outcomes = Vec::new();
    for &(id, _) in acceptance::CRITERIA.iter() {
        let mut o = acceptance::run(id, &cfg);
        if !cli.timing {
            o.runtime_ms = 0;
        }
        if cli.format == Format::Csv {
            writeln!(out.sink, "{o}")?;
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    match cli.format {
        Format::Json => out.json(&outcomes)?,
        Format::Csv => writeln!(out.sink, "{}", if passed { "all criteria passed" } else { "some criteria FAILED" })?,
    }
    Ok(passed)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if !cli.tol.is_finite() || cli.tol <= 0.0 {
        return Err(bad("tol must be positive"));
    }
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let mut out = Output::open(cli.out.as_deref())?;
    match &cli.command {
        Command::Interpolate(a) => cmd_interpolate(cli, a, &mut out)?,
        Command::Bounds(a) => cmd_bounds(cli, a, &mut out)?,
        Command::Oracle(a) => cmd_oracle(cli, a, &mut out)?,
        Command::Sweep(a) => cmd_sweep(cli, a, &mut out)?,
        Command::Bernstein(a) => cmd_bernstein(cli, a, &mut out)?,
        Command::Verify(a) => return cmd_verify(cli, a, &mut out),
    }
    out.sink.flush()?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
