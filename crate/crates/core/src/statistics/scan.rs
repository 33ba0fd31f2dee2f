//! Scan statistic: the maximum number of edges inside any n-vertex window.
//!
//! The exact scan walks all C(N, n) windows in revolving-door Gray order,
//! so consecutive windows differ by one swap and the edge count is updated
//! incrementally. A budget guard refuses enumerations that are too large;
//! callers may fall back to the greedy hill-climbing variant.

use rand::Rng;

use super::{StatName, StatValue};
use crate::combinatorics::{binomial, for_each_colex_subset};
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;

/// Default cap on exact-scan subset visits.
pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000_000;

/// Hard cap for the independent oracle (full recount per window).
pub const HST_ORACLE_MAX_SUBSETS: u64 = 1_000_000;

/// Environment variable overriding the default exact-scan budget.
pub const SCAN_BUDGET_ENV: &str = "HYPERTEST_SCAN_BUDGET";

/// The effective scan budget: `HYPERTEST_SCAN_BUDGET` if set and parseable,
/// otherwise `DEFAULT_SCAN_BUDGET`.
pub fn scan_budget() -> u64 {
    std::env::var(SCAN_BUDGET_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SCAN_BUDGET)
}

/// Per-vertex incidence lists: for each vertex, the other m-1 vertices of
/// each incident edge, flattened.
struct Incidence {
    chunk: usize,
    others: Vec<Vec<usize>>,
}

impl Incidence {
    fn build(g: &UniformHypergraph) -> Self {
        let chunk = g.arity() - 1;
        let mut others = vec![Vec::new(); g.n_vertices()];
        g.for_each_edge(|vs| {
            for (i, &v) in vs.iter().enumerate() {
                let row = &mut others[v];
                for (j, &w) in vs.iter().enumerate() {
                    if j != i {
                        row.push(w);
                    }
                }
            }
        });
        Incidence { chunk, others }
    }

    /// Edges containing v whose other vertices all lie in the marked set.
    #[inline]
    fn count_within(&self, v: usize, in_set: &[bool]) -> u64 {
        if self.chunk == 0 {
            return self.others[v].len() as u64;
        }
        let mut count = 0u64;
        for chunk in self.others[v].chunks_exact(self.chunk) {
            if chunk.iter().all(|&w| in_set[w]) {
                count += 1;
            }
        }
        count
    }
}

/// Revolving-door enumeration of k-subsets of {0, ..., n-1}. Emits
/// (removed, added) swaps transforming {0, ..., k-1} through every subset,
/// each visited exactly once, one swap per step.
fn revolving_door_forward<F: FnMut(usize, usize)>(n: usize, k: usize, f: &mut F) {
    if k == 0 || k >= n {
        return;
    }
    revolving_door_forward(n - 1, k, f);
    if k >= 2 {
        f(k - 2, n - 1);
    } else {
        f(n - 2, n - 1);
    }
    revolving_door_backward(n - 1, k - 1, f);
}

fn revolving_door_backward<F: FnMut(usize, usize)>(n: usize, k: usize, f: &mut F) {
    if k == 0 || k >= n {
        return;
    }
    revolving_door_forward(n - 1, k - 1, f);
    if k >= 2 {
        f(n - 1, k - 2);
    } else {
        f(n - 1, n - 2);
    }
    revolving_door_backward(n - 1, k, f);
}

fn validate_scan_size(g: &UniformHypergraph, n: usize) -> Result<()> {
    if n < g.arity() || n > g.n_vertices() {
        return Err(Error::Domain(format!(
            "scan size must satisfy m <= n <= N, got n={n}, m={}, N={}",
            g.arity(),
            g.n_vertices()
        )));
    }
    Ok(())
}

/// Exact scan statistic with the ambient budget (`scan_budget()`).
pub fn hst_stat(g: &UniformHypergraph, n: usize) -> Result<StatValue> {
    hst_stat_with_budget(g, n, scan_budget())
}

/// Exact scan statistic. Errors with `BudgetExceeded` when C(N, n) exceeds
/// `budget` instead of starting an enumeration that cannot finish.
pub fn hst_stat_with_budget(g: &UniformHypergraph, n: usize, budget: u64) -> Result<StatValue> {
    validate_scan_size(g, n)?;
    let big_n = g.n_vertices();
    let visits = binomial(big_n as u64, n as u64).unwrap_or(u64::MAX);
    if visits > budget {
        return Err(Error::BudgetExceeded { needed: visits, budget });
    }

    let inc = Incidence::build(g);
    let mut in_set = vec![false; big_n];
    let mut pos = vec![usize::MAX; big_n];
    let mut current: Vec<usize> = (0..n).collect();
    for (i, &v) in current.iter().enumerate() {
        in_set[v] = true;
        pos[v] = i;
    }

    let mut w: u64 = 0;
    g.for_each_edge(|vs| {
        if vs.iter().all(|&v| in_set[v]) {
            w += 1;
        }
    });

    let mut best = w;
    let mut witness = current.clone();
    revolving_door_forward(big_n, n, &mut |out, inn| {
        w -= inc.count_within(out, &in_set);
        in_set[out] = false;
        in_set[inn] = true;
        let i = pos[out];
        pos[out] = usize::MAX;
        pos[inn] = i;
        current[i] = inn;
        w += inc.count_within(inn, &in_set);
        if w > best {
            best = w;
            witness.copy_from_slice(&current);
        }
    });

    witness.sort_unstable();
    let mut out = StatValue::new(StatName::Hst, best as f64)
        .with_aux("subsets_visited", visits as f64)
        .with_aux("scan_size", n as f64);
    out.witness = Some(witness);
    Ok(out)
}

/// Independent exact oracle: recounts edges inside every window from
/// scratch in colex order. Only for small instances; used to validate the
/// incremental scan.
pub fn hst_oracle(g: &UniformHypergraph, n: usize) -> Result<StatValue> {
    validate_scan_size(g, n)?;
    let total = binomial(g.n_vertices() as u64, n as u64).unwrap_or(u64::MAX);
    if total > HST_ORACLE_MAX_SUBSETS {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget: HST_ORACLE_MAX_SUBSETS,
        });
    }
    let mut best: Option<u64> = None;
    let mut witness: Vec<usize> = Vec::new();
    for_each_colex_subset(g.n_vertices(), n, |s| {
        let w = g.edges_within(s).expect("enumerated subsets are valid");
        if best.map_or(true, |b| w > b) {
            best = Some(w);
            witness = s.to_vec();
        }
    });
    let best = best.expect("at least one window exists");
    let mut out = StatValue::new(StatName::Hst, best as f64)
        .with_aux("subsets_visited", total as f64)
        .with_aux("scan_size", n as f64);
    out.witness = Some(witness);
    Ok(out)
}

/// Greedy scan: hill-climbing on single-vertex swaps from a top-degree seed
/// plus `restarts` random seeds. Returns a lower bound flagged approximate.
pub fn hst_stat_greedy<R: Rng>(
    g: &UniformHypergraph,
    n: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<StatValue> {
    validate_scan_size(g, n)?;
    let big_n = g.n_vertices();
    let inc = Incidence::build(g);

    let climb = |seed: Vec<usize>| -> (u64, Vec<usize>) {
        let mut in_set = vec![false; big_n];
        for &v in &seed {
            in_set[v] = true;
        }
        let mut members = seed;
        let mut w: u64 = 0;
        g.for_each_edge(|vs| {
            if vs.iter().all(|&v| in_set[v]) {
                w += 1;
            }
        });
        loop {
            let mut best_gain = 0i64;
            let mut best_swap: Option<(usize, usize)> = None;
            for i in 0..members.len() {
                let u = members[i];
                let loss = inc.count_within(u, &in_set) as i64;
                in_set[u] = false;
                for v in 0..big_n {
                    if in_set[v] || v == u {
                        continue;
                    }
                    in_set[v] = true;
                    let gain = inc.count_within(v, &in_set) as i64 - loss;
                    in_set[v] = false;
                    if gain > best_gain {
                        best_gain = gain;
                        best_swap = Some((i, v));
                    }
                }
                in_set[u] = true;
            }
            match best_swap {
                Some((i, v)) => {
                    let u = members[i];
                    in_set[u] = false;
                    in_set[v] = true;
                    members[i] = v;
                    w = (w as i64 + best_gain) as u64;
                }
                None => break,
            }
        }
        members.sort_unstable();
        (w, members)
    };

    // Seed 0: the n highest-degree vertices, ties broken by index.
    let mut by_degree: Vec<usize> = (0..big_n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v).expect("in range")), v));
    let (mut best_w, mut best_set) = climb(by_degree[..n].to_vec());

    for _ in 0..restarts {
        // Partial Fisher-Yates draw of a uniform n-subset.
        let mut pool: Vec<usize> = (0..big_n).collect();
        for i in 0..n {
            let j = rng.gen_range(i..big_n);
            pool.swap(i, j);
        }
        let (w, set) = climb(pool[..n].to_vec());
        if w > best_w {
            best_w = w;
            best_set = set;
        }
    }

    let mut out = StatValue::new(StatName::Hst, best_w as f64)
        .with_aux("restarts", restarts as f64)
        .with_aux("scan_size", n as f64);
    out.approximate = true;
    out.witness = Some(best_set);
    Ok(out)
}
