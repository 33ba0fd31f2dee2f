//! Clique-existence statistic: is there an n-vertex set with every
//! m-subset present? Branch and bound over ascending vertex choices with
//! candidate filtering and a count-based prune.

use super::{scan_budget, StatName, StatValue};
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;

struct Searcher<'a> {
    g: &'a UniformHypergraph,
    target: usize,
    core_size: usize, // m - 2
    budget: u64,
    visited: u64,
    partial: Vec<usize>,
    idx: Vec<usize>,
    scratch: Vec<usize>,
    found: Option<Vec<usize>>,
}

impl<'a> Searcher<'a> {
    fn new(g: &'a UniformHypergraph, target: usize, budget: u64) -> Self {
        let m = g.arity();
        Searcher {
            g,
            target,
            core_size: m - 2,
            budget,
            visited: 0,
            partial: Vec::with_capacity(target),
            idx: vec![0; m.max(2) - 2],
            scratch: vec![0; m],
            found: None,
        }
    }

    /// All m-subsets of partial + {v, u} containing both v and u are edges.
    /// partial is ascending with max < v < u, so assembled sets are sorted.
    fn compatible(&mut self, v: usize, u: usize) -> bool {
        let k = self.core_size;
        if k == 0 {
            self.scratch[0] = v;
            self.scratch[1] = u;
            return self.g.has_edge_slice(&self.scratch);
        }
        if self.partial.len() < k {
            return true;
        }
        for (t, slot) in self.idx.iter_mut().enumerate() {
            *slot = t;
        }
        loop {
            for t in 0..k {
                self.scratch[t] = self.partial[self.idx[t]];
            }
            self.scratch[k] = v;
            self.scratch[k + 1] = u;
            if !self.g.has_edge_slice(&self.scratch) {
                return false;
            }
            // Colex successor of the index combination.
            let mut j = 0;
            loop {
                if j == k {
                    return true;
                }
                let limit = if j + 1 == k { self.partial.len() } else { self.idx[j + 1] };
                if self.idx[j] + 1 < limit {
                    break;
                }
                j += 1;
            }
            self.idx[j] += 1;
            for t in 0..j {
                self.idx[t] = t;
            }
        }
    }

    fn extend(&mut self, cands: &[usize]) -> Result<bool> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded {
                needed: self.visited,
                budget: self.budget,
            });
        }
        if self.partial.len() == self.target {
            self.found = Some(self.partial.clone());
            return Ok(true);
        }
        for i in 0..cands.len() {
            if self.partial.len() + (cands.len() - i) < self.target {
                break;
            }
            let v = cands[i];
            let mut next = Vec::with_capacity(cands.len() - i - 1);
            for j in (i + 1)..cands.len() {
                let u = cands[j];
                if self.compatible(v, u) {
                    next.push(u);
                }
            }
            self.partial.push(v);
            let hit = self.extend(&next)?;
            self.partial.pop();
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Indicator statistic: 1 when some n-set is fully dense (all C(n, m)
/// subsets present), else 0. Sets of size below m qualify vacuously.
pub fn hcnt_has_clique(g: &UniformHypergraph, n: usize) -> Result<StatValue> {
    hcnt_has_clique_with_budget(g, n, scan_budget())
}

/// As `hcnt_has_clique` with an explicit branch-node budget.
pub fn hcnt_has_clique_with_budget(
    g: &UniformHypergraph,
    n: usize,
    budget: u64,
) -> Result<StatValue> {
    if n == 0 || n > g.n_vertices() {
        return Err(Error::Domain(format!(
            "clique size must satisfy 1 <= n <= N, got n={n}, N={}",
            g.n_vertices()
        )));
    }
    let mut s = Searcher::new(g, n, budget);
    let cands: Vec<usize> = (0..g.n_vertices()).collect();
    let hit = s.extend(&cands)?;
    let mut out = StatValue::new(StatName::Hcnt, if hit { 1.0 } else { 0.0 })
        .with_aux("nodes_visited", s.visited as f64)
        .with_aux("clique_size", n as f64);
    out.witness = s.found;
    Ok(out)
}

/// Exhaustive clique number: the largest k with a fully dense k-set.
/// Always at least m-1 (vacuous). Shares the branch-node budget per call.
pub fn clique_number(g: &UniformHypergraph) -> Result<usize> {
    let mut k = g.arity() - 1;
    while k < g.n_vertices() {
        let v = hcnt_has_clique(g, k + 1)?;
        if v.value == 1.0 {
            k += 1;
        } else {
            break;
        }
    }
    Ok(k)
}
