//! Closed-form finite-sample detection-boundary ratios. Asymptotic
//! powerful/powerless conditions are rendered as ratios compared against a
//! margin: a degree ratio b1, a scan ratio b2, and advisory regime
//! diagnostics that are reported but never folded into the verdict.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, kl_bernoulli};
use crate::error::{Error, Result};
use crate::models::calibrated_background;

/// Sharp margin: ratios above it count as detectable, below its reciprocal
/// as undetectable.
pub const DEFAULT_MARGIN: f64 = 1.0;

/// Which parameter scenario a report was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCase {
    /// Planted complete subhypergraph (p1 = 1) against the clique threshold.
    Hpc,
    /// Both rates known to the tester.
    KnownRates,
    /// Rates unknown; the background is recalibrated to match expected
    /// total degrees.
    UnknownRates,
}

impl Default for BoundaryCase {
    fn default() -> Self {
        BoundaryCase::KnownRates
    }
}

impl BoundaryCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryCase::Hpc => "hpc",
            BoundaryCase::KnownRates => "known-rates",
            BoundaryCase::UnknownRates => "unknown-rates",
        }
    }
}

impl fmt::Display for BoundaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Region classification of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Undetectable,
    DetectableDegree,
    DetectableScan,
    DetectableBoth,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Undetectable => "undetectable",
            Verdict::DetectableDegree => "detectable-degree",
            Verdict::DetectableScan => "detectable-scan",
            Verdict::DetectableBoth => "detectable-both",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    pub fn is_detectable(&self) -> bool {
        matches!(
            self,
            Verdict::DetectableDegree | Verdict::DetectableScan | Verdict::DetectableBoth
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Finite-sample boundary evaluation at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub case: BoundaryCase,
    /// Degree-test ratio: above the margin the total-degree direction wins.
    pub b1: f64,
    /// Scan ratio: above 1 the scan direction wins.
    pub b2: f64,
    /// Calibrated background rate (unknown-rates case only).
    pub p0_prime: Option<f64>,
    /// Clique-size threshold (HPC case only).
    pub hpc_threshold: Option<f64>,
    pub verdict: Verdict,
    /// Advisory side-condition and regime values; never affect the verdict.
    pub diagnostics: BTreeMap<String, f64>,
}

/// Classification rule: detectable directions first, undetectable only when
/// both ratios are clearly below their thresholds, otherwise indeterminate.
fn classify(b1: f64, b2: f64, margin: f64) -> Verdict {
    let degree = b1 > margin;
    let scan = b2 > 1.0;
    if degree && scan {
        Verdict::DetectableBoth
    } else if degree {
        Verdict::DetectableDegree
    } else if scan {
        Verdict::DetectableScan
    } else if b1 < 1.0 / margin && b2 < 1.0 {
        Verdict::Undetectable
    } else {
        Verdict::Indeterminate
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if !margin.is_finite() || margin < 1.0 {
        return Err(Error::Domain(format!(
            "margin must be a finite value >= 1, got {margin}"
        )));
    }
    Ok(())
}

fn check_rates(p0: f64, p1: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!(
            "background rate must lie in (0, 1), got {p0}"
        )));
    }
    if !(p1 >= p0 && p1 <= 1.0) {
        return Err(Error::Domain(format!(
            "elevated rate must lie in [p0, 1], got p0={p0}, p1={p1}"
        )));
    }
    Ok(())
}

fn check_sizes(big_n: usize, m: usize, n: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("arity must be at least 2, got {m}")));
    }
    if n < m {
        return Err(Error::Domain(format!(
            "planted size must be at least the arity, got n={n}, m={m}"
        )));
    }
    if n >= big_n {
        return Err(Error::Domain(format!(
            "planted size must be below the vertex count, got n={n}, N={big_n}"
        )));
    }
    Ok(())
}

fn falling_factorial_f64(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out *= (n - i) as f64;
    }
    out
}

fn degree_ratio(big_n: usize, n: usize, p0: f64, p1: f64, exponent: f64) -> f64 {
    let size_term = (n as f64) * (n as f64) / big_n as f64;
    ((p1 - p0) / p0.sqrt()) * size_term.powf(exponent)
}

fn scan_ratio(big_n: usize, m: usize, n: usize, p0: f64, p1: f64) -> Result<f64> {
    let kl = kl_bernoulli(p0, p1)?;
    let mfac = factorial(m as u64)? as f64;
    Ok(falling_factorial_f64(n - 1, m - 1) * kl / (mfac * ((big_n as f64) / (n as f64)).ln()))
}

/// Clique-size threshold (m! log_{1/p0} N)^{1/(m-1)}: planted complete
/// subhypergraphs above it are found by clique existence, below it they are
/// information-theoretically hidden among null cliques.
pub fn hpc_threshold(big_n: usize, m: usize, p0: f64) -> Result<f64> {
    if big_n < 2 {
        return Err(Error::Domain(format!(
            "vertex count must be at least 2, got {big_n}"
        )));
    }
    if m < 2 {
        return Err(Error::Domain(format!("arity must be at least 2, got {m}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!(
            "background rate must lie in (0, 1), got {p0}"
        )));
    }
    let mfac = factorial(m as u64)? as f64;
    let log_base = (big_n as f64).ln() / (1.0 / p0).ln();
    Ok((mfac * log_base).powf(1.0 / (m as f64 - 1.0)))
}

/// Both-rates-known boundary:
///   b1 = ((p1 - p0)/sqrt(p0)) (n^2/N)^{m/2},
///   b2 = ff(n-1, m-1) H_{p0}(p1) / (m! ln(N/n)).
pub fn known_boundary(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    p1: f64,
) -> Result<BoundaryReport> {
    known_boundary_with_margin(big_n, m, n, p0, p1, DEFAULT_MARGIN)
}

/// As `known_boundary` with an explicit verdict margin.
pub fn known_boundary_with_margin(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    p1: f64,
    margin: f64,
) -> Result<BoundaryReport> {
    check_sizes(big_n, m, n)?;
    check_rates(p0, p1)?;
    check_margin(margin)?;
    let b1 = degree_ratio(big_n, n, p0, p1, m as f64 / 2.0);
    let b2 = scan_ratio(big_n, m, n, p0, p1)?;
    let mut diagnostics = regime_diagnostics(big_n, m, n, p0)?;
    diagnostics.insert("null_mass".to_string(), (big_n as f64).powi(m as i32) * p0);
    diagnostics.insert("planted_mass".to_string(), (n as f64).powi(m as i32) * p1);
    Ok(BoundaryReport {
        case: BoundaryCase::KnownRates,
        b1,
        b2,
        p0_prime: None,
        hpc_threshold: None,
        verdict: classify(b1, b2, margin),
        diagnostics,
    })
}

/// Unknown-rates boundary: the background is recalibrated to p0' so both
/// hypotheses share expected total degree, the degree exponent drops to
/// (m+1)/4, and the report carries the n^2-vs-N regime indicator choosing
/// between the two 2-path statistics plus the (2m-1)/4 extension ratio.
pub fn unknown_boundary(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    p1: f64,
) -> Result<BoundaryReport> {
    unknown_boundary_with_margin(big_n, m, n, p0, p1, DEFAULT_MARGIN)
}

/// As `unknown_boundary` with an explicit verdict margin.
pub fn unknown_boundary_with_margin(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    p1: f64,
    margin: f64,
) -> Result<BoundaryReport> {
    check_sizes(big_n, m, n)?;
    check_rates(p0, p1)?;
    check_margin(margin)?;
    let p0_prime = calibrated_background(big_n, m, n, p0, p1)?;
    let b1 = degree_ratio(big_n, n, p0_prime, p1, (m as f64 + 1.0) / 4.0);
    let b2 = scan_ratio(big_n, m, n, p0_prime, p1)?;
    let mut diagnostics = regime_diagnostics(big_n, m, n, p0_prime)?;
    diagnostics.insert(
        "regime_large_n".to_string(),
        if n * n >= big_n { 1.0 } else { 0.0 },
    );
    diagnostics.insert(
        "extension_ratio".to_string(),
        degree_ratio(big_n, n, p0_prime, p1, (2.0 * m as f64 - 1.0) / 4.0),
    );
    diagnostics.insert(
        "null_mass_over_2n".to_string(),
        p0 * (big_n as f64).powi(m as i32) / (2.0 * n as f64),
    );
    diagnostics.insert(
        "degree_mass".to_string(),
        (big_n as f64).powi(m as i32 - 1) * p0,
    );
    Ok(BoundaryReport {
        case: BoundaryCase::UnknownRates,
        b1,
        b2,
        p0_prime: Some(p0_prime),
        hpc_threshold: None,
        verdict: classify(b1, b2, margin),
        diagnostics,
    })
}

/// Planted-complete-subhypergraph boundary: b1 is the known-rates degree
/// ratio at p1 = 1 and b2 = n^{m-1}/(m! log_{1/p0} N), the (m-1)-th power
/// of n over the clique threshold.
pub fn hpc_boundary(big_n: usize, m: usize, n: usize, p0: f64) -> Result<BoundaryReport> {
    hpc_boundary_with_margin(big_n, m, n, p0, DEFAULT_MARGIN)
}

/// As `hpc_boundary` with an explicit verdict margin.
pub fn hpc_boundary_with_margin(
    big_n: usize,
    m: usize,
    n: usize,
    p0: f64,
    margin: f64,
) -> Result<BoundaryReport> {
    check_sizes(big_n, m, n)?;
    check_rates(p0, 1.0)?;
    check_margin(margin)?;
    let threshold = hpc_threshold(big_n, m, p0)?;
    let b1 = degree_ratio(big_n, n, p0, 1.0, m as f64 / 2.0);
    let b2 = (n as f64 / threshold).powi(m as i32 - 1);
    let mut diagnostics = regime_diagnostics(big_n, m, n, p0)?;
    diagnostics.insert("clique_margin".to_string(), n as f64 / threshold);
    Ok(BoundaryReport {
        case: BoundaryCase::Hpc,
        b1,
        b2,
        p0_prime: None,
        hpc_threshold: Some(threshold),
        verdict: classify(b1, b2, margin),
        diagnostics,
    })
}

/// Advisory regime ratios: log N / n^{m-1} and
/// ln(1 v 1/(n^{m-1} p)) / ln(N/n). Small values indicate the asymptotic
/// regime is plausibly in force.
pub fn regime_diagnostics(
    big_n: usize,
    m: usize,
    n: usize,
    p: f64,
) -> Result<BTreeMap<String, f64>> {
    if n >= big_n {
        return Err(Error::Domain(format!(
            "regime ratios need n < N, got n={n}, N={big_n}"
        )));
    }
    let clique_scale = (n as f64).powi(m as i32 - 1);
    let log_ratio = (big_n as f64).ln() / clique_scale;
    let sparsity = (1.0f64).max(1.0 / (clique_scale * p)).ln()
        / ((big_n as f64) / (n as f64)).ln();
    let mut out = BTreeMap::new();
    out.insert("log_ratio".to_string(), log_ratio);
    out.insert("sparsity_ratio".to_string(), sparsity);
    Ok(out)
}
