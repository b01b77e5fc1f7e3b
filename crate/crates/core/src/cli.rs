//! Command-line front end.
//!
//! Exit codes: 0 when the run completes (a statistical rejection is still a
//! completed run), 1 when an exact identity or an exponential-model numeric
//! check fails, 2 on usage, ingestion or domain errors.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::gof::{run_test, simulate_size_power, SampleBatch, TestReport, ENGINE_VERSION};
use crate::numeric::{default_x_max, discrepancy_curve, DEFAULT_GRID_POINTS};
use crate::ruiz::{sweep_induction_step, sweep_power_sum, sweep_key_identity, verify_ruiz, IdentityReport};
use crate::series::{
    check_lemma3_hypothesis, exp_density_series, maclaurin_reconstruct, verify_eq8, verify_lemma1,
    CoefficientMismatch,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Inclusive integer range written `a..b`, or a single integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub start: u64,
    pub end: u64,
}

impl IntRange {
    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("not an integer: {t:?}"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Self { start, end })
    }
}

impl Serialize for IntRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}..{}", self.start, self.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "equimax", version, about = "Exact and numerical checks of the consecutive-maxima characterization of the exponential distribution, and a goodness-of-fit test built on it")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Base seed echoed into every report (falls back to EQUIMAX_SEED, then 0)
    #[arg(long, global = true, env = "EQUIMAX_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Report format; csv is available for quad-check curves only
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact checks of the alternating-sum identities
    Identities(IdentitiesArgs),
    /// Exact truncated-series checks for an exponential density
    SeriesCheck(SeriesArgs),
    /// Quadrature check of the identity as distribution functions
    QuadCheck(QuadArgs),
    /// Goodness-of-fit test for exponentiality on a CSV sample
    GofTest(GofArgs),
    /// Size/power simulation of the goodness-of-fit test
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct IdentitiesArgs {
    #[arg(long, default_value_t = 12)]
    pub ruiz_nmax: u64,
    /// Comma-separated rational evaluation points
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-3,-1/2,0,1,7/3,10")]
    pub ruiz_x: Vec<ExactRational>,
    #[arg(long, default_value_t = 20)]
    pub lemma2_mmax: u64,
    #[arg(long, default_value_t = 12)]
    pub lemma2_kmax: u64,
    #[arg(long, default_value_t = 12)]
    pub theorem_nmax: u64,
    /// Largest k for the H_{k+1,i}(k+2) induction-step check
    #[arg(long, default_value_t = 8)]
    pub step_kmax: u64,
    #[arg(long, default_value_t = 16)]
    pub step_imax: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SeriesArgs {
    /// Exponential rate, exact (e.g. 1, 7/5, 0.25)
    #[arg(long, default_value = "1")]
    pub lambda: ExactRational,
    /// Group sizes for the convolution identity, `a..b` inclusive
    #[arg(long, default_value = "2..8")]
    pub n: IntRange,
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    /// Largest m for the derivative formula of F^m f
    #[arg(long, default_value_t = 6)]
    pub derivative_mmax: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QuadArgs {
    #[arg(long, default_value = "exp:rate=1")]
    pub model: DensityModel,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Right end of the grid; defaults to the 0.999 quantile of the maximum of n
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GofArgs {
    /// CSV file, one positive value per line, optional `value` header
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of permutations
    #[arg(long = "B", default_value_t = 500)]
    #[serde(rename = "B")]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long, default_value = "exp:rate=1")]
    pub model: DensityModel,
    /// Sample size per replicate
    #[arg(long = "N", default_value_t = 1200)]
    #[serde(rename = "N")]
    pub sample_size: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 400)]
    pub reps: usize,
    #[arg(long = "B", default_value_t = 300)]
    #[serde(rename = "B")]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

/// Fully resolved invocation, embedded in every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        let subcommand = match cli.command {
            Command::Identities(_) => "identities",
            Command::SeriesCheck(_) => "series-check",
            Command::QuadCheck(_) => "quad-check",
            Command::GofTest(_) => "gof-test",
            Command::Simulate(_) => "simulate",
        };
        let tagged = serde_json::to_value(&cli.command).expect("arguments serialize");
        let parameters = tagged.get(subcommand).cloned().unwrap_or(serde_json::Value::Null);
        Self {
            subcommand,
            parameters,
            seed: cli.seed,
            output_path: cli.output.clone(),
            format: cli.format,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    engine_version: &'static str,
    config: &'a RunConfig,
    passed: bool,
    result: T,
}

/// Exit status plus the rendered report document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub report: String,
}

fn render<T: Serialize>(config: &RunConfig, passed: bool, result: T) -> Result<String> {
    let envelope = Envelope { engine_version: ENGINE_VERSION, config, passed, result };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn json_outcome<T: Serialize>(config: &RunConfig, passed: bool, result: T) -> Result<Outcome> {
    Ok(Outcome {
        status: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        report: render(config, passed, result)?,
    })
}

fn require_json(config: &RunConfig) -> Result<()> {
    if config.format == Format::Csv {
        return Err(Error::domain(format!(
            "--format csv is only available for quad-check, not {}",
            config.subcommand
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct IdentitiesResult {
    ruiz: IdentityReport,
    power_sum: IdentityReport,
    key_identity: IdentityReport,
    induction_step: IdentityReport,
}

#[derive(Serialize)]
struct ConvolutionEntry {
    n: u64,
    outside_titular_scope: bool,
    status: &'static str,
    mismatch: Option<CoefficientMismatch>,
}

#[derive(Serialize)]
struct SeriesResult {
    lambda: ExactRational,
    order: usize,
    eq8: Vec<ConvolutionEntry>,
    gm_derivatives: Vec<IdentityReport>,
    derivative_chain: IdentityReport,
    reconstruction_matches: bool,
}

#[derive(Serialize)]
struct GofResult<'a> {
    source: &'a str,
    values: usize,
    interpretation: &'static str,
    test: TestReport,
}

fn identities(config: &RunConfig, args: &IdentitiesArgs) -> Result<Outcome> {
    require_json(config)?;
    let result = IdentitiesResult {
        ruiz: verify_ruiz(args.ruiz_nmax, &args.ruiz_x)?,
        power_sum: sweep_power_sum(args.lemma2_mmax, args.lemma2_kmax),
        key_identity: sweep_key_identity(args.theorem_nmax),
        induction_step: sweep_induction_step(args.step_kmax, args.step_imax),
    };
    let passed = result.ruiz.passed()
        && result.power_sum.passed()
        && result.key_identity.passed()
        && result.induction_step.passed();
    json_outcome(config, passed, result)
}

fn series_check(config: &RunConfig, args: &SeriesArgs) -> Result<Outcome> {
    require_json(config)?;
    let needed = args.order.max(2 * args.derivative_mmax).max(1);
    let f = exp_density_series(&args.lambda, needed)?;
    let mut eq8 = Vec::new();
    for n in args.n.iter() {
        let mismatch = verify_eq8(&f, n, args.order)?;
        eq8.push(ConvolutionEntry {
            n,
            outside_titular_scope: n == 2,
            status: if mismatch.is_none() { "no mismatch" } else { "mismatch" },
            mismatch,
        });
    }
    let gm_derivatives = (1..=args.derivative_mmax)
        .map(|m| verify_lemma1(&f, m))
        .collect::<Result<Vec<_>>>()?;
    let derivative_chain = check_lemma3_hypothesis(&f, needed)?;
    let f0 = f.coefficients()[0].clone();
    let f1 = f.coefficients()[1].clone();
    let reconstruction_matches = maclaurin_reconstruct(&f0, &f1, needed)? == f;
    let passed = eq8.iter().all(|e| e.mismatch.is_none())
        && gm_derivatives.iter().all(IdentityReport::passed)
        && derivative_chain.passed()
        && reconstruction_matches;
    let result = SeriesResult {
        lambda: args.lambda.clone(),
        order: args.order,
        eq8,
        gm_derivatives,
        derivative_chain,
        reconstruction_matches,
    };
    json_outcome(config, passed, result)
}

fn quad_check(config: &RunConfig, args: &QuadArgs) -> Result<Outcome> {
    let x_max = match args.x_max {
        Some(x) => x,
        None => default_x_max(&args.model, args.n)?,
    };
    let curve = discrepancy_curve(&args.model, args.n, x_max, args.grid, args.tol)?;
    // Only an exponential model is supposed to satisfy the identity.
    let passed = !(args.model.is_exponential() && curve.identity_fails);
    let status = if passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    match config.format {
        Format::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            Ok(Outcome { status, report: String::from_utf8(buf).expect("ascii csv") })
        }
        Format::Json => Ok(Outcome { status, report: render(config, passed, curve)? }),
    }
}

fn gof_test(config: &RunConfig, args: &GofArgs) -> Result<Outcome> {
    require_json(config)?;
    let file = File::open(&args.input)
        .map_err(|e| Error::Io(format!("{}: {e}", args.input.display())))?;
    let source = args.input.display().to_string();
    let batch = SampleBatch::from_reader(BufReader::new(file), source, config.seed)?;
    let test = run_test(&batch, args.n, args.permutations, args.alpha, config.seed)?;
    let interpretation = if test.reject {
        "rejected: the two maxima statistics differ in distribution, so the sample is not consistent with an exponential parent"
    } else {
        "not rejected: consistent with equidistribution of the maxima statistics; this does not by itself establish exponentiality, which also requires a density analytic near zero"
    };
    let result = GofResult { source: batch.source(), values: batch.len(), interpretation, test };
    json_outcome(config, true, result)
}

fn simulate(config: &RunConfig, args: &SimulateArgs) -> Result<Outcome> {
    require_json(config)?;
    let report = simulate_size_power(
        &args.model,
        args.sample_size,
        args.n,
        args.reps,
        args.permutations,
        args.alpha,
        config.seed,
    )?;
    json_outcome(config, true, report)
}

/// Runs the subcommand and renders its report without writing it anywhere.
pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let config = RunConfig::from_cli(cli);
    match &cli.command {
        Command::Identities(a) => identities(&config, a),
        Command::SeriesCheck(a) => series_check(&config, a),
        Command::QuadCheck(a) => quad_check(&config, a),
        Command::GofTest(a) => gof_test(&config, a),
        Command::Simulate(a) => simulate(&config, a),
    }
}

/// Parses `args`, dispatches, writes the report, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, outcome.report.as_bytes()),
        None => std::io::stdout().lock().write_all(outcome.report.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    outcome.status
}
