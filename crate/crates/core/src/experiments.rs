//! Threshold calibration, Monte Carlo risk estimation, and parameter-grid
//! sweeps. Every replication draws from its own counter-derived RNG stream,
//! so results are bit-reproducible for a given master seed regardless of
//! thread count or scheduling.
//!
//! Stream-id layout (within the 64-bit stream space):
//!   - null evaluation:  grid_index * 2^32 + replication
//!   - calibration:      2^62 + replication
//!   - alternative:      2^63 + replication
//! Sweep cells shift each block by cell_index * 2^40. Cells that share the
//! same null distribution and statistic reuse the first such cell's null
//! draws, so type-I error and MC thresholds are common across cells that
//! differ only in p1.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::boundaries::{
    hpc_boundary_with_margin, known_boundary_with_margin, unknown_boundary_with_margin,
    BoundaryCase, BoundaryReport, DEFAULT_MARGIN,
};
use crate::combinatorics::{binomial, kl_inverse_upper};
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;
use crate::models::{sample_null_with, sample_planted_with, NullModel, PlantedModel, RngStream};
use crate::statistics::{
    hcnt_has_clique, hl2pt_stat_with, hst_stat, hst_stat_greedy, ht2pt_stat, htdt_stat, p0_hat,
    L2Denominator, StatName, StatValue,
};

const CALIBRATION_BASE: u64 = 1 << 62;
const ALT_BASE: u64 = 1 << 63;
const CELL_STRIDE: u64 = 1 << 40;
const GRID_STRIDE: u64 = 1 << 32;
const MAX_REPS: u64 = u32::MAX as u64;
const MAX_CELLS: usize = 1 << 20;

/// How the rejection threshold is chosen. Rejection is always on
/// statistic >= threshold; the clique indicator pairs with `Fixed(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdPolicy {
    /// Conservative empirical null quantile from `reps` fresh simulations.
    McQuantile { alpha: f64, reps: u64 },
    /// a * C(n, m) with a = eta p0 + (1 - eta) p1; eta defaults to
    /// min((C(n,m) p1)^{-1/4}, (ln(N/n))^{-1/4}, 1).
    AnalyticScanKnown { eta: Option<f64>, p1: f64 },
    /// C(n, m) * H^{-1}_{p0_hat}(n (ln(N/n) + 2) / C(n, m)), recomputed per
    /// replication from the observed graph.
    AnalyticScanUnknown,
    Fixed { value: f64 },
    /// Standard-normal upper quantile, for the asymptotically standardized
    /// statistics.
    GaussianQuantile { alpha: f64 },
}

impl ThresholdPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdPolicy::McQuantile { alpha, reps } => {
                // alpha = 1 is allowed as the degenerate always-reject case.
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::Config(format!(
                        "mc-quantile alpha must lie in (0, 1], got {alpha}"
                    )));
                }
                if reps < 100 {
                    return Err(Error::Config(format!(
                        "mc-quantile needs at least 100 calibration reps, got {reps}"
                    )));
                }
                check_reps(reps)
            }
            ThresholdPolicy::AnalyticScanKnown { eta, p1 } => {
                if let Some(e) = eta {
                    if !(e > 0.0 && e <= 1.0) {
                        return Err(Error::Config(format!(
                            "analytic-scan-known eta must lie in (0, 1], got {e}"
                        )));
                    }
                }
                if !(p1 > 0.0 && p1 <= 1.0) {
                    return Err(Error::Config(format!(
                        "analytic-scan-known p1 must lie in (0, 1], got {p1}"
                    )));
                }
                Ok(())
            }
            ThresholdPolicy::AnalyticScanUnknown => Ok(()),
            ThresholdPolicy::Fixed { value } => {
                if !value.is_finite() {
                    return Err(Error::Config(format!(
                        "fixed threshold must be finite, got {value}"
                    )));
                }
                Ok(())
            }
            ThresholdPolicy::GaussianQuantile { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Config(format!(
                        "gaussian-quantile alpha must lie in (0, 1), got {alpha}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Exact scan or hill-climbing fallback for graphs too large to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    #[default]
    Exact,
    Greedy { restarts: usize },
}

/// One test to run: which statistic, how to pick its threshold, and the
/// scan options that apply when the statistic searches over subsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub statistic: StatName,
    pub policy: ThresholdPolicy,
    #[serde(default)]
    pub scan_mode: ScanMode,
    #[serde(default)]
    pub l2_denominator: L2Denominator,
}

impl TestSpec {
    pub fn new(statistic: StatName, policy: ThresholdPolicy) -> Self {
        TestSpec {
            statistic,
            policy,
            scan_mode: ScanMode::default(),
            l2_denominator: L2Denominator::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()
    }
}

/// Empirical risk of one test against one alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskEstimate {
    /// Fraction of null replications rejected (max over the null grid for
    /// composite nulls).
    pub type1: f64,
    pub se1: f64,
    /// Fraction of alternative replications retained.
    pub type2: f64,
    pub se2: f64,
    /// type1 + type2.
    pub risk: f64,
    /// Shared threshold, or the p0-reference value for the per-replication
    /// unknown-scan policy.
    pub threshold: f64,
    pub reps: u64,
    pub seed: u64,
}

/// Extra evaluation settings for `estimate_risk_with`.
#[derive(Debug, Clone, Default)]
pub struct RiskOptions {
    /// Null rates whose maximum type-I error is reported; empty means the
    /// single true p0 of the null model.
    pub null_grid: Vec<f64>,
    /// Stream-block offset; sweeps assign one block per cell.
    pub cell_base: u64,
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 || reps > MAX_REPS {
        return Err(Error::Config(format!(
            "replication count must lie in 1..={MAX_REPS}, got {reps}"
        )));
    }
    Ok(())
}

fn need_scan_size(scan_n: Option<usize>, what: &str) -> Result<usize> {
    scan_n.ok_or_else(|| Error::Config(format!("{what} needs the subset size n")))
}

fn binomial_se(rate: f64, reps: u64) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

fn normal_upper_quantile(alpha: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - alpha)
}

/// Smallest simulated value whose empirical exceedance is at most alpha;
/// +infinity (never reject) when even the largest value exceeds too often.
fn mc_quantile(values: &mut [f64], alpha: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let reps = values.len();
    let mut i = 0;
    while i < reps {
        if (reps - i) as f64 / reps as f64 <= alpha {
            return values[i];
        }
        let v = values[i];
        while i < reps && values[i] == v {
            i += 1;
        }
    }
    f64::INFINITY
}

fn analytic_scan_known_threshold(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    eta: Option<f64>,
    p1: f64,
) -> Result<f64> {
    if n >= big_n {
        return Err(Error::Config(format!(
            "analytic scan threshold needs n < N, got n={n}, N={big_n}"
        )));
    }
    let windows = binomial(n as u64, m as u64)? as f64;
    let eta = match eta {
        Some(e) => e,
        None => (windows * p1)
            .powf(-0.25)
            .min((big_n as f64 / n as f64).ln().powf(-0.25))
            .min(1.0),
    };
    Ok((eta * p0 + (1.0 - eta) * p1) * windows)
}

/// Degenerate observed rates pin the threshold to the end of the scan's
/// range: an empty graph always rejects, a complete one rejects only on a
/// full window.
fn unknown_scan_threshold(big_n: usize, m: usize, n: usize, rate: f64) -> Result<f64> {
    if n >= big_n {
        return Err(Error::Config(format!(
            "analytic scan threshold needs n < N, got n={n}, N={big_n}"
        )));
    }
    let windows = binomial(n as u64, m as u64)? as f64;
    if rate <= 0.0 {
        return Ok(0.0);
    }
    if rate >= 1.0 {
        return Ok(windows);
    }
    let budget = n as f64 * ((big_n as f64 / n as f64).ln() + 2.0) / windows;
    Ok(windows * kl_inverse_upper(rate, budget)?)
}

fn eval_graph(
    spec: &TestSpec,
    g: &UniformHypergraph,
    scan_n: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<StatValue> {
    match spec.statistic {
        StatName::Htdt => Ok(htdt_stat(g)),
        StatName::Hst => {
            let n = need_scan_size(scan_n, "the scan statistic")?;
            match spec.scan_mode {
                ScanMode::Exact => hst_stat(g, n),
                ScanMode::Greedy { restarts } => hst_stat_greedy(g, n, restarts, rng),
            }
        }
        StatName::Hcnt => hcnt_has_clique(g, need_scan_size(scan_n, "the clique statistic")?),
        StatName::Hl2pt => hl2pt_stat_with(g, spec.l2_denominator),
        StatName::Ht2pt => ht2pt_stat(g),
    }
}

/// (statistic value, per-replication threshold). The second slot is NaN
/// except under the unknown-scan policy.
type RepEval = (f64, f64);

fn eval_sampled(
    spec: &TestSpec,
    g: &UniformHypergraph,
    scan_n: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<RepEval> {
    let value = eval_graph(spec, g, scan_n, rng)?.value;
    let per_rep = if matches!(spec.policy, ThresholdPolicy::AnalyticScanUnknown) {
        let n = need_scan_size(scan_n, "the unknown-scan policy")?;
        unknown_scan_threshold(g.n_vertices(), g.arity(), n, p0_hat(g))?
    } else {
        f64::NAN
    };
    Ok((value, per_rep))
}

fn null_evals(
    spec: &TestSpec,
    model: &NullModel,
    scan_n: Option<usize>,
    master_seed: u64,
    stream_base: u64,
    reps: u64,
) -> Result<Vec<RepEval>> {
    (0..reps as usize)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(master_seed, stream_base + r as u64).rng();
            let g = sample_null_with(model, &mut rng)?;
            eval_sampled(spec, &g, scan_n, &mut rng)
        })
        .collect()
}

fn alt_evals(
    spec: &TestSpec,
    model: &PlantedModel,
    scan_n: Option<usize>,
    master_seed: u64,
    stream_base: u64,
    reps: u64,
) -> Result<Vec<RepEval>> {
    (0..reps as usize)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(master_seed, stream_base + r as u64).rng();
            let g = sample_planted_with(model, &mut rng)?;
            eval_sampled(spec, &g, scan_n, &mut rng)
        })
        .collect()
}

fn count_rejections(evals: &[RepEval], spec: &TestSpec, threshold: f64) -> usize {
    if matches!(spec.policy, ThresholdPolicy::AnalyticScanUnknown) {
        evals.iter().filter(|(v, t)| v >= t).count()
    } else {
        evals.iter().filter(|(v, _)| *v >= threshold).count()
    }
}

fn resolve_threshold(
    spec: &TestSpec,
    null: &NullModel,
    scan_n: Option<usize>,
    master_seed: u64,
    cell_base: u64,
) -> Result<f64> {
    match spec.policy {
        ThresholdPolicy::Fixed { value } => Ok(value),
        ThresholdPolicy::GaussianQuantile { alpha } => Ok(normal_upper_quantile(alpha)),
        ThresholdPolicy::AnalyticScanKnown { eta, p1 } => analytic_scan_known_threshold(
            null.n_vertices(),
            null.arity(),
            need_scan_size(scan_n, "the analytic scan policy")?,
            null.p0(),
            eta,
            p1,
        ),
        ThresholdPolicy::AnalyticScanUnknown => unknown_scan_threshold(
            null.n_vertices(),
            null.arity(),
            need_scan_size(scan_n, "the analytic scan policy")?,
            null.p0(),
        ),
        ThresholdPolicy::McQuantile { alpha, reps } => {
            let evals = null_evals(
                spec,
                null,
                scan_n,
                master_seed,
                CALIBRATION_BASE + cell_base,
                reps,
            )?;
            let mut values: Vec<f64> = evals.iter().map(|e| e.0).collect();
            Ok(mc_quantile(&mut values, alpha))
        }
    }
}

/// Threshold for `spec` against `null`. MC policies simulate on the
/// calibration stream block of `master_seed`; the unknown-scan policy
/// returns its p0-reference value (per-replication values are recomputed
/// inside `estimate_risk`).
pub fn calibrate_threshold(
    spec: &TestSpec,
    null: &NullModel,
    scan_n: Option<usize>,
    master_seed: u64,
) -> Result<f64> {
    spec.validate()?;
    resolve_threshold(spec, null, scan_n, master_seed, 0)
}

/// Monte Carlo risk: type-I on the null model plus type-II against the
/// planted alternative with its fixed planted set, reps replications each.
pub fn estimate_risk(
    spec: &TestSpec,
    null: &NullModel,
    alt: &PlantedModel,
    reps: u64,
    master_seed: u64,
) -> Result<RiskEstimate> {
    estimate_risk_with(spec, null, alt, reps, master_seed, &RiskOptions::default())
}

/// As `estimate_risk`, with a composite-null grid (type-I is the max over
/// the grid) and a sweep stream-block offset.
pub fn estimate_risk_with(
    spec: &TestSpec,
    null: &NullModel,
    alt: &PlantedModel,
    reps: u64,
    master_seed: u64,
    options: &RiskOptions,
) -> Result<RiskEstimate> {
    spec.validate()?;
    check_reps(reps)?;
    if null.n_vertices() != alt.n_vertices() || null.arity() != alt.arity() {
        return Err(Error::Config(format!(
            "null ({}, {}) and alternative ({}, {}) must share (N, m)",
            null.n_vertices(),
            null.arity(),
            alt.n_vertices(),
            alt.arity()
        )));
    }
    if let ThresholdPolicy::AnalyticScanKnown { p1, .. } = spec.policy {
        if (p1 - alt.p1()).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "analytic-scan-known policy p1 = {p1} does not match the alternative p1 = {}",
                alt.p1()
            )));
        }
    }
    let scan_n = Some(alt.planted_size());
    let threshold = resolve_threshold(spec, null, scan_n, master_seed, options.cell_base)?;

    let grid: Vec<f64> = if options.null_grid.is_empty() {
        vec![null.p0()]
    } else {
        options.null_grid.clone()
    };
    if grid.len() as u64 > CELL_STRIDE / GRID_STRIDE {
        return Err(Error::Config(format!(
            "null grid is limited to {} rates, got {}",
            CELL_STRIDE / GRID_STRIDE,
            grid.len()
        )));
    }
    let mut type1 = f64::NEG_INFINITY;
    for (i, &rate) in grid.iter().enumerate() {
        let grid_null = NullModel::new(null.n_vertices(), null.arity(), rate)?;
        let evals = null_evals(
            spec,
            &grid_null,
            scan_n,
            master_seed,
            options.cell_base + i as u64 * GRID_STRIDE,
            reps,
        )?;
        let t1 = count_rejections(&evals, spec, threshold) as f64 / reps as f64;
        type1 = type1.max(t1);
    }

    let evals = alt_evals(spec, alt, scan_n, master_seed, ALT_BASE + options.cell_base, reps)?;
    let type2 = (reps as usize - count_rejections(&evals, spec, threshold)) as f64 / reps as f64;

    Ok(RiskEstimate {
        type1,
        se1: binomial_se(type1, reps),
        type2,
        se2: binomial_se(type2, reps),
        risk: type1 + type2,
        threshold,
        reps,
        seed: master_seed,
    })
}

/// Grid axis over one model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisParam {
    #[serde(rename = "N")]
    BigN,
    #[serde(rename = "n")]
    SmallN,
    #[serde(rename = "p0")]
    P0,
    #[serde(rename = "p1")]
    P1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

/// Base parameter point; axes override individual fields per cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub m: usize,
    pub n: usize,
    pub p0: f64,
    pub p1: f64,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

/// Declarative sweep: a fixed parameter point, axes that vary it, one test,
/// and the boundary scenario evaluated per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub fixed: FixedParams,
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub test: StatName,
    pub policy: ThresholdPolicy,
    pub reps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scenario: BoundaryCase,
    #[serde(default)]
    pub scan_mode: ScanMode,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub l2_denominator: L2Denominator,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        check_reps(self.reps)?;
        let mut seen = Vec::new();
        let mut cells = 1usize;
        for axis in &self.axes {
            if seen.contains(&axis.param) {
                return Err(Error::Config(format!(
                    "axis parameter {:?} appears twice",
                    axis.param
                )));
            }
            seen.push(axis.param);
            if axis.values.is_empty() {
                return Err(Error::Config(format!(
                    "axis {:?} has no values",
                    axis.param
                )));
            }
            for &v in &axis.values {
                if !v.is_finite() {
                    return Err(Error::Config(format!(
                        "axis {:?} holds a non-finite value",
                        axis.param
                    )));
                }
                if matches!(axis.param, AxisParam::BigN | AxisParam::SmallN)
                    && (v.fract() != 0.0 || v < 0.0)
                {
                    return Err(Error::Config(format!(
                        "axis {:?} needs non-negative integers, got {v}",
                        axis.param
                    )));
                }
            }
            cells = cells.saturating_mul(axis.values.len());
        }
        if cells > MAX_CELLS {
            return Err(Error::Config(format!(
                "sweep has {cells} cells, more than the {MAX_CELLS} limit"
            )));
        }
        Ok(())
    }

    fn cell_params(&self, cell_idx: usize) -> FixedParams {
        let mut params = self.fixed;
        let mut rem = cell_idx;
        for axis in self.axes.iter().rev() {
            let k = rem % axis.values.len();
            rem /= axis.values.len();
            let v = axis.values[k];
            match axis.param {
                AxisParam::BigN => params.big_n = v as usize,
                AxisParam::SmallN => params.n = v as usize,
                AxisParam::P0 => params.p0 = v,
                AxisParam::P1 => params.p1 = v,
            }
        }
        params
    }

    fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product::<usize>().max(1)
    }
}

/// One sweep cell: the parameter point, its boundary evaluation, and the
/// Monte Carlo risk. Infeasible cells set `error` and NaN numerics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub m: usize,
    pub n: usize,
    pub p0: f64,
    pub p1: f64,
    pub p0_prime: Option<f64>,
    pub b1: f64,
    pub b2: f64,
    pub verdict: String,
    pub test: StatName,
    pub threshold: f64,
    pub type1: f64,
    pub se1: f64,
    pub type2: f64,
    pub se2: f64,
    pub risk: f64,
    pub reps: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Boundary report for one scenario at one parameter point; the HPC case
/// evaluates the clique boundary and ignores p1.
pub fn scenario_boundary(
    scenario: BoundaryCase,
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    p1: f64,
    margin: f64,
) -> Result<BoundaryReport> {
    match scenario {
        BoundaryCase::KnownRates => known_boundary_with_margin(big_n, m, n, p0, p1, margin),
        BoundaryCase::UnknownRates => unknown_boundary_with_margin(big_n, m, n, p0, p1, margin),
        BoundaryCase::Hpc => hpc_boundary_with_margin(big_n, m, n, p0, margin),
    }
}

fn cell_boundary(config: &SweepConfig, p: &FixedParams) -> Result<BoundaryReport> {
    scenario_boundary(
        config.scenario,
        p.big_n,
        p.m,
        p.n,
        p.p0,
        p.p1,
        config.margin,
    )
}

struct SweepCaches {
    null_evals: BTreeMap<String, Vec<RepEval>>,
    thresholds: BTreeMap<String, f64>,
}

fn run_cell(
    config: &SweepConfig,
    p: &FixedParams,
    cell_base: u64,
    caches: &mut SweepCaches,
) -> Result<SweepRecord> {
    let boundary = cell_boundary(config, p)?;
    let null = NullModel::new(p.big_n, p.m, p.p0)?;
    let alt = PlantedModel::new(p.big_n, p.m, p.n, p.p0, p.p1)?;
    let mut spec = TestSpec {
        statistic: config.test,
        policy: config.policy,
        scan_mode: config.scan_mode,
        l2_denominator: config.l2_denominator,
    };
    if let ThresholdPolicy::AnalyticScanKnown { eta, .. } = spec.policy {
        spec.policy = ThresholdPolicy::AnalyticScanKnown { eta, p1: p.p1 };
    }
    spec.validate()?;
    let scan_n = Some(p.n);

    let null_key = format!(
        "{}|{}|{}|{}|{}|{:?}|{}",
        p.big_n,
        p.m,
        p.n,
        p.p0.to_bits(),
        spec.statistic,
        spec.scan_mode,
        spec.l2_denominator
    );
    let threshold_key = format!(
        "{null_key}|{}",
        serde_json::to_string(&spec.policy).map_err(|e| Error::Config(e.to_string()))?
    );

    if !caches.thresholds.contains_key(&threshold_key) {
        let t = resolve_threshold(&spec, &null, scan_n, config.seed, cell_base)?;
        caches.thresholds.insert(threshold_key.clone(), t);
    }
    let threshold = caches.thresholds[&threshold_key];

    if !caches.null_evals.contains_key(&null_key) {
        let evals = null_evals(&spec, &null, scan_n, config.seed, cell_base, config.reps)?;
        caches.null_evals.insert(null_key.clone(), evals);
    }
    let nulls = &caches.null_evals[&null_key];
    let type1 = count_rejections(nulls, &spec, threshold) as f64 / config.reps as f64;

    let alts = alt_evals(&spec, &alt, scan_n, config.seed, ALT_BASE + cell_base, config.reps)?;
    let type2 =
        (config.reps as usize - count_rejections(&alts, &spec, threshold)) as f64 / config.reps as f64;

    Ok(SweepRecord {
        big_n: p.big_n,
        m: p.m,
        n: p.n,
        p0: p.p0,
        p1: p.p1,
        p0_prime: boundary.p0_prime,
        b1: boundary.b1,
        b2: boundary.b2,
        verdict: boundary.verdict.as_str().to_string(),
        test: spec.statistic,
        threshold,
        type1,
        se1: binomial_se(type1, config.reps),
        type2,
        se2: binomial_se(type2, config.reps),
        risk: type1 + type2,
        reps: config.reps,
        seed: config.seed,
        error: None,
    })
}

fn error_record(config: &SweepConfig, p: &FixedParams, err: &Error) -> SweepRecord {
    SweepRecord {
        big_n: p.big_n,
        m: p.m,
        n: p.n,
        p0: p.p0,
        p1: p.p1,
        p0_prime: None,
        b1: f64::NAN,
        b2: f64::NAN,
        verdict: "error".to_string(),
        test: config.test,
        threshold: f64::NAN,
        type1: f64::NAN,
        se1: f64::NAN,
        type2: f64::NAN,
        se2: f64::NAN,
        risk: f64::NAN,
        reps: config.reps,
        seed: config.seed,
        error: Some(err.to_string()),
    }
}

/// Evaluate every cell of the grid in row-major order (first axis slowest).
/// Cells are sequential, replications within a cell parallel; infeasible
/// cells produce error records and the sweep continues.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let mut caches = SweepCaches {
        null_evals: BTreeMap::new(),
        thresholds: BTreeMap::new(),
    };
    let mut out = Vec::with_capacity(config.cell_count());
    for cell_idx in 0..config.cell_count() {
        let params = config.cell_params(cell_idx);
        let cell_base = cell_idx as u64 * CELL_STRIDE;
        match run_cell(config, &params, cell_base, &mut caches) {
            Ok(record) => out.push(record),
            Err(err) => out.push(error_record(config, &params, &err)),
        }
    }
    Ok(out)
}
