//! The five test statistics. Every statistic is a deterministic function of
//! the hypergraph (plus explicit options), evaluated with a fixed summation
//! order so repeated runs agree bit for bit.

mod clique;
mod scan;
mod two_path;

pub use clique::{clique_number, hcnt_has_clique, hcnt_has_clique_with_budget};
pub use scan::{
    hst_oracle, hst_stat, hst_stat_greedy, hst_stat_with_budget, scan_budget,
    DEFAULT_SCAN_BUDGET, HST_ORACLE_MAX_SUBSETS, SCAN_BUDGET_ENV,
};
pub use two_path::{
    hl2pt_stat, hl2pt_stat_with, ht2pt_numerator_oracle, ht2pt_stat, l2path_v1_v2,
    l2path_v1_v2_with, L2Denominator, HT2PT_ORACLE_MAX_TUPLES,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;

/// Identifies one of the implemented tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatName {
    /// Total degree test: W = edge count.
    Htdt,
    /// Scan test: max edges within an n-subset.
    Hst,
    /// Clique-existence test at the planted size.
    Hcnt,
    /// Degree-variance (L2-norm 2-path) test.
    Hl2pt,
    /// Tight 2-path test.
    Ht2pt,
}

impl StatName {
    pub const ALL: [StatName; 5] = [
        StatName::Htdt,
        StatName::Hst,
        StatName::Hcnt,
        StatName::Hl2pt,
        StatName::Ht2pt,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StatName::Htdt => "htdt",
            StatName::Hst => "hst",
            StatName::Hcnt => "hcnt",
            StatName::Hl2pt => "hl2pt",
            StatName::Ht2pt => "ht2pt",
        }
    }

    /// Whether the statistic needs the scan size n.
    pub fn needs_scan_size(&self) -> bool {
        matches!(self, StatName::Hst | StatName::Hcnt)
    }
}

impl fmt::Display for StatName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "htdt" => Ok(StatName::Htdt),
            "hst" => Ok(StatName::Hst),
            "hcnt" => Ok(StatName::Hcnt),
            "hl2pt" => Ok(StatName::Hl2pt),
            "ht2pt" => Ok(StatName::Ht2pt),
            other => Err(Error::Config(format!(
                "unknown test {other:?}; expected one of htdt, hst, hcnt, hl2pt, ht2pt"
            ))),
        }
    }
}

/// Result of evaluating a statistic on one hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct StatValue {
    pub name: StatName,
    pub value: f64,
    /// Named intermediates (p0_hat, v1, v2, numerator, ...). BTreeMap keeps
    /// serialization order deterministic.
    pub aux: BTreeMap<String, f64>,
    /// Set when the statistic is undefined as displayed (e.g. the empty or
    /// complete graph for the normalized 2-path tests); value is forced 0.
    pub degenerate: bool,
    /// Set when the value is a heuristic lower bound (greedy scan).
    pub approximate: bool,
    /// Optimal or best-found vertex set for scan and clique statistics.
    pub witness: Option<Vec<usize>>,
}

impl StatValue {
    fn new(name: StatName, value: f64) -> Self {
        StatValue {
            name,
            value,
            aux: BTreeMap::new(),
            degenerate: false,
            approximate: false,
            witness: None,
        }
    }

    fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }
}

/// Fraction of potential edges present.
pub fn p0_hat(g: &UniformHypergraph) -> f64 {
    g.edge_count() as f64 / g.capacity() as f64
}

/// Ordered vertex star count: the number of ordered (m-1)-tuples of
/// pairwise-distinct vertices completing v to a present edge, i.e.
/// (m-1)! times the degree.
pub fn vertex_star_count(g: &UniformHypergraph, v: usize) -> Result<u64> {
    let fac = factorial(g.arity() as u64 - 1)?;
    g.degree(v)?
        .checked_mul(fac)
        .ok_or(Error::Overflow { op: "vertex_star_count" })
}

/// Total degree test statistic: the raw edge count W.
pub fn htdt_stat(g: &UniformHypergraph) -> StatValue {
    StatValue::new(StatName::Htdt, g.edge_count() as f64)
        .with_aux("edge_count", g.edge_count() as f64)
}
