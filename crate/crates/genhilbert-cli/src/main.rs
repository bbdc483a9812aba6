//! `genhilbert`: command-line front end for moment tables, Carleson
//! reports, operator application, essential-norm brackets and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verdict failure, 2 usage/config error,
//! 3 numerical-certification failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use genhilbert::analytic::{self, PowerSeries};
use genhilbert::measure::{CarlesonGridSpec, Measure};
use genhilbert::operator::{essnorm_bracket, AlphaMode, HankelOperator};
use genhilbert::{verify, Error};

#[derive(Parser, Debug)]
#[command(name = "genhilbert", version, about = "Generalized Hilbert operator toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: CommonOpts,
}

/// Flags shared by all subcommands; any of them may also come from a
/// `--config` JSON file (flags override the file).
#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// JSON config file with the same keys as the long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Inline measure spec, e.g. 'power_log beta=2 gamma=-2'
    #[arg(long, global = true)]
    measure: Option<String>,
    /// Path to a JSON measure spec file
    #[arg(long, global = true)]
    measure_file: Option<PathBuf>,
    /// Source-space Bloch exponent (power mode)
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Carleson tail exponent
    #[arg(long, global = true)]
    s: Option<f64>,
    /// Logarithmic Carleson exponent
    #[arg(long, global = true)]
    logq: Option<f64>,
    /// Dyadic depth of the reported Carleson grid
    #[arg(long, global = true)]
    grid_depth: Option<u32>,
    /// Largest moment order
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Series truncation degree
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Quadrature relative tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker thread count for parallel sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment table (n, mu_n, err)
    Moments,
    /// Dyadic tail-ratio report with boundedness/vanishing verdicts
    Carleson,
    /// Apply the operator via both routes and report the residual
    Apply {
        /// Input series: one | z | poly c0,c1,... | power lambda=L alpha=A | log lambda=L
        #[arg(long, default_value = "one")]
        f: String,
        /// Evaluation points: comma-separated re or re:im
        #[arg(long, default_value = "0.5")]
        z: String,
    },
    /// Essential-norm bracket (witness lower bound vs tail-ratio formula)
    Essnorm,
    /// Run verification suites
    Verify {
        /// Suite id (T2.3, T3.5, T3.6/T3.7, T4.3, C2.4, L3.2, L3.3, L4.1) or 'all'
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

/// Serializable run configuration; round-trips through JSON and rejects
/// unknown keys. Flags override file values field by field.
#[derive(Serialize, Deserialize, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub measure: Option<String>,
    pub measure_file: Option<String>,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub logq: Option<f64>,
    pub grid_depth: Option<u32>,
    pub nmax: Option<usize>,
    pub trunc: Option<usize>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub format: Option<String>,
    pub out: Option<String>,
}

impl RunConfig {
    fn from_opts(opts: &CommonOpts) -> Result<RunConfig, Error> {
        let mut cfg = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if opts.measure.is_some() {
            cfg.measure = opts.measure.clone();
        }
        if let Some(p) = &opts.measure_file {
            cfg.measure_file = Some(p.display().to_string());
        }
        cfg.alpha = opts.alpha.or(cfg.alpha);
        cfg.s = opts.s.or(cfg.s);
        cfg.logq = opts.logq.or(cfg.logq);
        cfg.grid_depth = opts.grid_depth.or(cfg.grid_depth);
        cfg.nmax = opts.nmax.or(cfg.nmax);
        cfg.trunc = opts.trunc.or(cfg.trunc);
        cfg.tol = opts.tol.or(cfg.tol);
        cfg.jobs = opts.jobs.or(cfg.jobs);
        if opts.format.is_some() {
            cfg.format = opts.format.clone();
        }
        if let Some(p) = &opts.out {
            cfg.out = Some(p.display().to_string());
        }
        Ok(cfg)
    }

    fn measure(&self) -> Result<Measure, Error> {
        if let Some(path) = &self.measure_file {
            if self.measure.is_some() {
                return Err(Error::Config("--measure and --measure-file are mutually exclusive".into()));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("measure file {path}: {e}")))?;
            return Measure::from_spec_json(&text);
        }
        match &self.measure {
            Some(spec) => Measure::parse_inline(spec),
            None => Err(Error::Config("no measure given (use --measure or --measure-file)".into())),
        }
    }

    fn format(&self) -> Result<Format, Error> {
        match self.format.as_deref() {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(Error::Config(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }

    fn write(&self, content: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, content)
                .map_err(|e| Error::Config(format!("writing {path}: {e}"))),
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

/// All floating output uses 17 significant digits so reports diff
/// cleanly across runs and machines.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_moments(cfg: &RunConfig) -> Result<(), Error> {
    let m = cfg.measure()?;
    let nmax = cfg.nmax.unwrap_or(16);
    let table = match cfg.tol {
        Some(tol) => m.moment_table_with_tol(nmax, tol)?,
        None => m.moment_table(nmax)?,
    };
    let text = match cfg.format()? {
        Format::Csv => {
            let mut out = String::from("n,moment,abs_err\n");
            for n in 0..=table.n_max() {
                out.push_str(&format!("{n},{},{}\n", fmt(table.value(n)), fmt(table.err(n))));
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = (0..=table.n_max())
                .map(|n| {
                    serde_json::json!({
                        "n": n,
                        "moment": fmt(table.value(n)),
                        "abs_err": fmt(table.err(n)),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("json") + "\n"
        }
    };
    cfg.write(&text)
}

fn cmd_carleson(cfg: &RunConfig) -> Result<(), Error> {
    let m = cfg.measure()?;
    let s = cfg.s.ok_or_else(|| Error::Config("carleson requires --s".into()))?;
    let q = cfg.logq.unwrap_or(0.0);
    let mut grid = CarlesonGridSpec::default();
    if let Some(depth) = cfg.grid_depth {
        grid.depth = depth;
        grid.decision_depth = grid.decision_depth.max(depth);
    }
    let report = m.carleson_report(s, q, &grid)?;
    let text = match cfg.format()? {
        Format::Csv => {
            let mut out = String::from("j,radius,ratio\n");
            for (i, (&r, &ratio)) in report.grid.iter().zip(&report.ratios).enumerate() {
                out.push_str(&format!("{},{},{}\n", i + 1, fmt(r), fmt(ratio)));
            }
            out.push_str(&format!(
                "# sup={} tail_limsup={} bounded={} vanishing={}\n",
                fmt(report.sup_estimate),
                fmt(report.tail_limsup_estimate),
                report.verdict_bounded,
                report.verdict_vanishing
            ));
            out
        }
        Format::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
    };
    cfg.write(&text)
}

fn parse_series(spec: &str, trunc: usize) -> Result<PowerSeries, Error> {
    let spec = spec.trim();
    let mut tokens = spec.split_whitespace();
    let head = tokens.next().ok_or_else(|| Error::Config("empty series spec".into()))?;
    let kv = |tok: &str| -> Result<(String, f64), Error> {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value in series spec, got '{tok}'")))?;
        let v: f64 = v.parse().map_err(|_| Error::Config(format!("bad number '{v}' in series spec")))?;
        Ok((k.to_string(), v))
    };
    match head {
        "one" | "1" => Ok(PowerSeries::one()),
        "z" => Ok(PowerSeries::polynomial(&[0.0, 1.0])),
        "poly" => {
            let rest = tokens.collect::<Vec<_>>().join("");
            let mut coeffs = Vec::new();
            for c in rest.split(',').filter(|c| !c.is_empty()) {
                coeffs.push(c.parse().map_err(|_| Error::Config(format!("bad coefficient '{c}'")))?);
            }
            if coeffs.is_empty() {
                return Err(Error::Config("poly spec lists no coefficients".into()));
            }
            Ok(PowerSeries::polynomial(&coeffs))
        }
        "power" | "log" => {
            let mut lambda = None;
            let mut alpha = None;
            for tok in tokens {
                let (k, v) = kv(tok)?;
                match k.as_str() {
                    "lambda" => lambda = Some(v),
                    "alpha" => alpha = Some(v),
                    other => return Err(Error::Config(format!("unknown field '{other}' in series spec"))),
                }
            }
            let lambda = lambda.ok_or_else(|| Error::Config(format!("{head} family requires lambda=")))?;
            if head == "power" {
                let alpha = alpha.ok_or_else(|| Error::Config("power family requires alpha=".into()))?;
                analytic::test_function_power(lambda, alpha, trunc)
            } else {
                if alpha.is_some() {
                    return Err(Error::Config("log family takes no alpha".into()));
                }
                analytic::test_function_log(lambda, trunc)
            }
        }
        other => Err(Error::Config(format!("unknown series spec '{other}'"))),
    }
}

fn parse_points(spec: &str) -> Result<Vec<Complex64>, Error> {
    let mut pts = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (re, im) = match tok.split_once(':') {
            Some((re, im)) => (re, im),
            None => (tok, "0"),
        };
        let re: f64 = re.parse().map_err(|_| Error::Config(format!("bad point '{tok}'")))?;
        let im: f64 = im.parse().map_err(|_| Error::Config(format!("bad point '{tok}'")))?;
        pts.push(Complex64::new(re, im));
    }
    if pts.is_empty() {
        return Err(Error::Config("no evaluation points given".into()));
    }
    Ok(pts)
}

fn cmd_apply(cfg: &RunConfig, f_spec: &str, z_spec: &str) -> Result<(), Error> {
    let m = cfg.measure()?;
    let trunc = cfg.trunc.unwrap_or(256);
    let f = parse_series(f_spec, trunc)?;
    let points = parse_points(z_spec)?;
    let op = HankelOperator::new(m, trunc)?;
    let image = op.apply_coeff(&f)?;

    let mut rows = Vec::with_capacity(points.len());
    for &z in &points {
        let via_coeff = image.eval(z)?;
        let via_integral = op.apply_integral(&f, z)?;
        rows.push((z, via_coeff, via_integral, (via_coeff - via_integral).norm()));
    }
    let text = match cfg.format()? {
        Format::Csv => {
            let mut out = String::from("re_z,im_z,coeff_re,coeff_im,integral_re,integral_im,residual\n");
            for (z, a, b, res) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(z.re), fmt(z.im), fmt(a.re), fmt(a.im), fmt(b.re), fmt(b.im), fmt(*res)
                ));
            }
            out
        }
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|(z, a, b, res)| {
                    serde_json::json!({
                        "z": [fmt(z.re), fmt(z.im)],
                        "coeff_route": [fmt(a.re), fmt(a.im)],
                        "integral_route": [fmt(b.re), fmt(b.im)],
                        "residual": fmt(*res),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&objs).expect("json") + "\n"
        }
    };
    cfg.write(&text)
}

fn cmd_essnorm(cfg: &RunConfig) -> Result<(), Error> {
    let m = cfg.measure()?;
    let mode = match (cfg.alpha, cfg.logq) {
        (Some(_), Some(q)) if q != 0.0 => {
            return Err(Error::Config("--alpha and --logq select conflicting modes".into()))
        }
        (Some(alpha), _) => AlphaMode::Power { alpha },
        (None, Some(q)) if q == 1.0 => AlphaMode::Log,
        (None, Some(q)) => {
            return Err(Error::Config(format!("log mode supports logq=1 only, got {q}")))
        }
        (None, None) => return Err(Error::Config("essnorm requires --alpha or --logq 1".into())),
    };
    let op = HankelOperator::new(m, cfg.trunc.unwrap_or(64))?;
    let bracket = essnorm_bracket(&op, mode, &[])?;
    let text = match cfg.format()? {
        Format::Csv => {
            let mut out = String::from("lambda,witness,closed_form_bound\n");
            for i in 0..bracket.lambda_grid.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt(bracket.lambda_grid[i]),
                    fmt(bracket.witnesses[i]),
                    fmt(bracket.closed_form_bounds[i])
                ));
            }
            out.push_str(&format!(
                "# lower_witness={} formula={} collapses_to_zero={}\n",
                fmt(bracket.lower_witness),
                fmt(bracket.formula_value),
                bracket.collapses_to_zero
            ));
            out
        }
        Format::Json => serde_json::to_string_pretty(&bracket).expect("json") + "\n",
    };
    cfg.write(&text)
}

/// Returns false when at least one suite fails.
fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<bool, Error> {
    let verdicts = if suite == "all" {
        verify::run_all()?
    } else {
        vec![verify::run_suite(suite, cfg.alpha)?]
    };
    let text = serde_json::to_string_pretty(&verdicts).expect("json") + "\n";
    cfg.write(&text)?;
    Ok(verdicts.iter().all(|v| v.pass))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidMeasure(_) | Error::Domain(_) | Error::SizeExceeded { .. } => 2,
        Error::TruncationInsufficient(_)
        | Error::Quadrature(_)
        | Error::HypothesisViolated(_)
        | Error::NonIntegrable(_)
        | Error::OperatorUndefined(_) => 3,
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = RunConfig::from_opts(&cli.opts)?;
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be >= 1".into()));
        }
        // effective only before the worker pool spins up, i.e. here
        std::env::set_var("RAYON_NUM_THREADS", jobs.to_string());
    }
    match &cli.command {
        Command::Moments => cmd_moments(&cfg).map(|()| true),
        Command::Carleson => cmd_carleson(&cfg).map(|()| true),
        Command::Apply { f, z } => cmd_apply(&cfg, f, z).map(|()| true),
        Command::Essnorm => cmd_essnorm(&cfg).map(|()| true),
        Command::Verify { suite } => cmd_verify(&cfg, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
