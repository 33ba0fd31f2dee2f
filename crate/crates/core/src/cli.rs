//! Command-line surface: generate, stat, risk, sweep, boundary and plot
//! subcommands over the library, with byte-deterministic output for fixed
//! flags and seed.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::boundaries::{BoundaryCase, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::experiments::{
    estimate_risk_with, scenario_boundary, sweep, RiskOptions, ScanMode, SweepConfig,
    SweepRecord, TestSpec, ThresholdPolicy,
};
use crate::hypergraph::UniformHypergraph;
use crate::models::{derive_stream, sample_null, sample_planted, NullModel, PlantedModel};
use crate::plot::heatmap_svg;
use crate::report::{json_line, write_jsonl, write_sweep_csv};
use crate::statistics::{
    hcnt_has_clique, hl2pt_stat_with, hst_stat, hst_stat_greedy, ht2pt_stat, htdt_stat,
    L2Denominator, StatName, StatValue,
};

#[derive(Parser)]
#[command(
    name = "hypertest",
    version,
    about = "Dense subhypergraph detection: samplers, test statistics, \
             detection boundaries and Monte Carlo risk"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a null or planted hypergraph and write its edge list.
    Gen(GenArgs),
    /// Evaluate one statistic on an edge-list file.
    Stat(StatArgs),
    /// Monte Carlo risk of one test at one parameter point.
    Risk(RiskArgs),
    /// Risk plus boundary verdicts over a parameter grid from a JSON config.
    Sweep(SweepArgs),
    /// Closed-form detection-boundary report at one parameter point.
    Boundary(BoundaryArgs),
    /// Render a sweep CSV as an SVG heatmap.
    Plot(PlotArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct GenArgs {
    /// Number of vertices.
    #[arg(long = "N", value_name = "N")]
    big_n: usize,
    /// Edge arity m (>= 2).
    #[arg(long)]
    m: usize,
    /// Background edge probability.
    #[arg(long)]
    p0: f64,
    /// Planted set size; plants on the first n vertices (requires --p1).
    #[arg(long, requires = "p1")]
    n: Option<usize>,
    /// Planted edge probability (requires --n).
    #[arg(long, requires = "n")]
    p1: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatArgs {
    /// Statistic: htdt, hst, hcnt, hl2pt or ht2pt.
    #[arg(long, value_parser = parse_stat)]
    test: StatName,
    /// Edge-list file to evaluate.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Subset size for hst and hcnt.
    #[arg(long)]
    n: Option<usize>,
    /// Greedy-scan restarts for hst; exact enumeration when omitted.
    #[arg(long)]
    restarts: Option<usize>,
    /// Seed for the greedy scan.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree-variance denominator: n-minus-m-factorial or n-minus-m.
    #[arg(long, value_parser = parse_denominator, default_value = "n-minus-m-factorial")]
    l2_denominator: L2Denominator,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RiskArgs {
    /// Number of vertices.
    #[arg(long = "N", value_name = "N")]
    big_n: usize,
    /// Edge arity m (>= 2).
    #[arg(long)]
    m: usize,
    /// Planted set size.
    #[arg(long)]
    n: usize,
    /// Background edge probability.
    #[arg(long)]
    p0: f64,
    /// Planted edge probability.
    #[arg(long)]
    p1: f64,
    /// Statistic: htdt, hst, hcnt, hl2pt or ht2pt.
    #[arg(long, value_parser = parse_stat)]
    test: StatName,
    /// Threshold policy: mc-quantile, analytic-scan-known,
    /// analytic-scan-unknown, fixed or gaussian-quantile.
    #[arg(long, default_value = "mc-quantile")]
    policy: String,
    /// Quantile level for mc-quantile and gaussian-quantile.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Null simulations used to calibrate the mc-quantile threshold.
    #[arg(long, default_value_t = 1000)]
    calibration_reps: u64,
    /// Threshold for the fixed policy.
    #[arg(long)]
    fixed_value: Option<f64>,
    /// Mixing weight for analytic-scan-known; data-driven when omitted.
    #[arg(long)]
    eta: Option<f64>,
    /// Evaluation replications per hypothesis.
    #[arg(long, default_value_t = 200)]
    reps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Greedy-scan restarts for hst; exact enumeration when omitted.
    #[arg(long)]
    restarts: Option<usize>,
    /// Degree-variance denominator: n-minus-m-factorial or n-minus-m.
    #[arg(long, value_parser = parse_denominator, default_value = "n-minus-m-factorial")]
    l2_denominator: L2Denominator,
    /// Extra background rates; type-I error is the maximum over the grid.
    #[arg(long, value_delimiter = ',')]
    null_grid: Vec<f64>,
    /// Boundary scenario for the csv record: known, unknown or hpc.
    #[arg(long, default_value = "known", value_parser = parse_scenario)]
    scenario: BoundaryCase,
    /// Detectability margin for the boundary verdict.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Worker threads; results do not depend on this value.
    #[arg(long)]
    threads: Option<usize>,
    /// Output format; csv includes the boundary columns.
    #[arg(long, value_enum, default_value_t = OutputFormat::Jsonl)]
    format: OutputFormat,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration (keys: fixed, axes, test, policy, reps,
    /// seed, scenario, scan_mode, margin, l2_denominator).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; results do not depend on this value.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    /// Number of vertices.
    #[arg(long = "N", value_name = "N")]
    big_n: usize,
    /// Edge arity m (>= 2).
    #[arg(long)]
    m: usize,
    /// Planted set size.
    #[arg(long)]
    n: usize,
    /// Background edge probability.
    #[arg(long)]
    p0: f64,
    /// Planted edge probability; required for known and unknown, fixed at 1
    /// for hpc.
    #[arg(long)]
    p1: Option<f64>,
    /// Scenario: known, unknown or hpc.
    #[arg(long, default_value = "known", value_parser = parse_scenario)]
    scenario: BoundaryCase,
    /// Detectability margin for the verdict.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV with a header row.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Column for the horizontal axis.
    #[arg(long)]
    x: String,
    /// Column for the vertical axis.
    #[arg(long)]
    y: String,
    /// Cell value column; verdict gets the categorical palette, numeric
    /// columns a green-to-red ramp.
    #[arg(long)]
    value: String,
    /// Output SVG path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_stat(s: &str) -> std::result::Result<StatName, String> {
    StatName::from_str(s).map_err(|e| e.to_string())
}

fn parse_denominator(s: &str) -> std::result::Result<L2Denominator, String> {
    L2Denominator::from_str(s).map_err(|e| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<BoundaryCase, String> {
    match s.to_ascii_lowercase().as_str() {
        "known" | "known-rates" => Ok(BoundaryCase::KnownRates),
        "unknown" | "unknown-rates" => Ok(BoundaryCase::UnknownRates),
        "hpc" => Ok(BoundaryCase::Hpc),
        other => Err(format!(
            "unknown scenario {other:?}; expected known, unknown or hpc"
        )),
    }
}

/// Maps parameter and input validity problems to exit code 2 and runtime
/// failures (budget, calibration, I/O) to exit code 3.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Domain(_)
        | Error::Construction(_)
        | Error::InvalidSubset(_)
        | Error::VertexOutOfRange { .. } => 2,
        _ => 3,
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run_with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::Config("--threads must be at least 1".to_string())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Parses and dispatches; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Stat(a) => cmd_stat(a),
        Command::Risk(a) => cmd_risk(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Boundary(a) => cmd_boundary(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let stream = derive_stream(a.seed, 0);
    let g = match (a.n, a.p1) {
        (Some(n), Some(p1)) => {
            let model = PlantedModel::new(a.big_n, a.m, n, a.p0, p1)?;
            sample_planted(&model, &stream)?
        }
        _ => sample_null(&NullModel::new(a.big_n, a.m, a.p0)?, &stream)?,
    };
    let mut w = open_output(a.out.as_deref())?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Single-line record for one statistic evaluation; witness vertices use
/// the file convention (1-based).
#[derive(Serialize)]
struct StatRecord<'a> {
    name: &'a str,
    value: f64,
    aux: &'a BTreeMap<String, f64>,
    degenerate: bool,
    approximate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
}

impl<'a> From<&'a StatValue> for StatRecord<'a> {
    fn from(v: &'a StatValue) -> Self {
        StatRecord {
            name: v.name.as_str(),
            value: v.value,
            aux: &v.aux,
            degenerate: v.degenerate,
            approximate: v.approximate,
            witness: v
                .witness
                .as_ref()
                .map(|w| w.iter().map(|&x| x + 1).collect()),
        }
    }
}

fn cmd_stat(a: StatArgs) -> Result<()> {
    let g = UniformHypergraph::parse_edge_list(BufReader::new(File::open(&a.input)?))?;
    let need_n = a.n.ok_or_else(|| {
        Error::Config(format!("--test {} requires --n", a.test))
    });
    let value = match a.test {
        StatName::Htdt => htdt_stat(&g),
        StatName::Hst => {
            let n = need_n?;
            match a.restarts {
                Some(r) => hst_stat_greedy(&g, n, r, &mut derive_stream(a.seed, 0).rng())?,
                None => hst_stat(&g, n)?,
            }
        }
        StatName::Hcnt => hcnt_has_clique(&g, need_n?)?,
        StatName::Hl2pt => hl2pt_stat_with(&g, a.l2_denominator)?,
        StatName::Ht2pt => ht2pt_stat(&g)?,
    };
    let line = json_line(&StatRecord::from(&value))?;
    let mut w = open_output(a.out.as_deref())?;
    writeln!(w, "{line}")?;
    w.flush()?;
    Ok(())
}

fn build_policy(a: &RiskArgs) -> Result<ThresholdPolicy> {
    match a.policy.as_str() {
        "mc-quantile" => Ok(ThresholdPolicy::McQuantile {
            alpha: a.alpha,
            reps: a.calibration_reps,
        }),
        "analytic-scan-known" => Ok(ThresholdPolicy::AnalyticScanKnown {
            eta: a.eta,
            p1: a.p1,
        }),
        "analytic-scan-unknown" => Ok(ThresholdPolicy::AnalyticScanUnknown),
        "fixed" => {
            let value = a.fixed_value.ok_or_else(|| {
                Error::Config("--policy fixed requires --fixed-value".to_string())
            })?;
            Ok(ThresholdPolicy::Fixed { value })
        }
        "gaussian-quantile" => Ok(ThresholdPolicy::GaussianQuantile { alpha: a.alpha }),
        other => Err(Error::Config(format!(
            "unknown policy {other:?}; expected mc-quantile, analytic-scan-known, \
             analytic-scan-unknown, fixed or gaussian-quantile"
        ))),
    }
}

fn scan_mode_from(restarts: Option<usize>) -> ScanMode {
    match restarts {
        Some(restarts) => ScanMode::Greedy { restarts },
        None => ScanMode::Exact,
    }
}

fn cmd_risk(a: RiskArgs) -> Result<()> {
    let spec = TestSpec {
        statistic: a.test,
        policy: build_policy(&a)?,
        scan_mode: scan_mode_from(a.restarts),
        l2_denominator: a.l2_denominator,
    };
    let null = NullModel::new(a.big_n, a.m, a.p0)?;
    let alt = PlantedModel::new(a.big_n, a.m, a.n, a.p0, a.p1)?;
    let options = RiskOptions {
        null_grid: a.null_grid.clone(),
        ..RiskOptions::default()
    };
    let est = run_with_threads(a.threads, || {
        estimate_risk_with(&spec, &null, &alt, a.reps, a.seed, &options)
    })?;
    let mut w = open_output(a.out.as_deref())?;
    match a.format {
        OutputFormat::Jsonl => {
            writeln!(w, "{}", json_line(&est)?)?;
        }
        OutputFormat::Csv => {
            let b = scenario_boundary(a.scenario, a.big_n, a.m, a.n, a.p0, a.p1, a.margin)?;
            let record = SweepRecord {
                big_n: a.big_n,
                m: a.m,
                n: a.n,
                p0: a.p0,
                p1: a.p1,
                p0_prime: b.p0_prime,
                b1: b.b1,
                b2: b.b2,
                verdict: b.verdict.as_str().to_string(),
                test: a.test,
                threshold: est.threshold,
                type1: est.type1,
                se1: est.se1,
                type2: est.type2,
                se2: est.se2,
                risk: est.risk,
                reps: est.reps,
                seed: est.seed,
                error: None,
            };
            write_sweep_csv(&mut w, &[record])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.config)?;
    let config: SweepConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("sweep config: {e}")))?;
    let records = run_with_threads(a.threads, || sweep(&config))?;
    for r in &records {
        if let Some(msg) = &r.error {
            eprintln!(
                "warning: cell (N={}, n={}, p0={}, p1={}): {msg}",
                r.big_n, r.n, r.p0, r.p1
            );
        }
    }
    let mut w = open_output(a.out.as_deref())?;
    match a.format {
        OutputFormat::Csv => write_sweep_csv(&mut w, &records)?,
        OutputFormat::Jsonl => write_jsonl(&mut w, &records)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_boundary(a: BoundaryArgs) -> Result<()> {
    let p1 = match (a.scenario, a.p1) {
        (BoundaryCase::Hpc, _) => 1.0,
        (_, Some(p1)) => p1,
        (_, None) => {
            return Err(Error::Config(format!(
                "scenario {} requires --p1",
                a.scenario
            )))
        }
    };
    let report = scenario_boundary(a.scenario, a.big_n, a.m, a.n, a.p0, p1, a.margin)?;
    let mut w = open_output(a.out.as_deref())?;
    writeln!(w, "{}", json_line(&report)?)?;
    w.flush()?;
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let csv_text = std::fs::read_to_string(&a.input)?;
    let svg = heatmap_svg(&csv_text, &a.x, &a.y, &a.value)?;
    let mut w = open_output(a.out.as_deref())?;
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    Ok(())
}
