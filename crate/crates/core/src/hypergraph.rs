//! m-uniform hypergraph on vertices {0, ..., N-1} with edge presence stored
//! as a bitset indexed by colexicographic rank. Degrees are maintained
//! incrementally so vertex-star statistics stay O(1) per lookup.

use std::io::{BufRead, Write};

use crate::combinatorics::{binomial, BinomialTable, SubsetKey};
use crate::error::{Error, Result};

/// Default cap on the number of potential edges C(N, m), i.e. bitset bits.
pub const DEFAULT_EDGE_CAPACITY_BITS: u64 = 1 << 30;

#[derive(Debug, Clone)]
pub struct UniformHypergraph {
    n_vertices: usize,
    arity: usize,
    capacity: u64,
    bits: Vec<u64>,
    degrees: Vec<u64>,
    edge_count: u64,
    table: BinomialTable,
}

impl UniformHypergraph {
    /// Empty hypergraph with the default capacity cap.
    pub fn new_empty(n_vertices: usize, arity: usize) -> Result<Self> {
        Self::new_empty_with_capacity(n_vertices, arity, DEFAULT_EDGE_CAPACITY_BITS)
    }

    /// Empty hypergraph; errors if C(N, m) exceeds `max_bits`.
    pub fn new_empty_with_capacity(
        n_vertices: usize,
        arity: usize,
        max_bits: u64,
    ) -> Result<Self> {
        if arity < 2 {
            return Err(Error::Construction(format!(
                "arity must be at least 2, got {arity}"
            )));
        }
        if arity > n_vertices {
            return Err(Error::Construction(format!(
                "arity {arity} exceeds vertex count {n_vertices}"
            )));
        }
        let capacity = binomial(n_vertices as u64, arity as u64).map_err(|_| {
            Error::Construction(format!(
                "C({n_vertices}, {arity}) overflows the edge index"
            ))
        })?;
        if capacity > max_bits {
            return Err(Error::Construction(format!(
                "C({n_vertices}, {arity}) = {capacity} exceeds the edge capacity cap {max_bits}"
            )));
        }
        let words = ((capacity + 63) / 64) as usize;
        Ok(UniformHypergraph {
            n_vertices,
            arity,
            capacity,
            bits: vec![0u64; words],
            degrees: vec![0u64; n_vertices],
            edge_count: 0,
            table: BinomialTable::new(n_vertices.max(1), arity + 1),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of potential edges C(N, m).
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    fn validate_key(&self, key: &SubsetKey) -> Result<()> {
        if key.arity() != self.arity {
            return Err(Error::InvalidSubset(format!(
                "edge arity {} does not match hypergraph arity {}",
                key.arity(),
                self.arity
            )));
        }
        if let Some(&v) = key.vertices().last() {
            if v >= self.n_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n_vertices: self.n_vertices,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn has_bit(&self, rank: u64) -> bool {
        let w = (rank / 64) as usize;
        let b = rank % 64;
        (self.bits[w] >> b) & 1 == 1
    }

    fn set_bit(&mut self, rank: u64, present: bool) -> bool {
        let w = (rank / 64) as usize;
        let b = rank % 64;
        let old = (self.bits[w] >> b) & 1 == 1;
        if present {
            self.bits[w] |= 1u64 << b;
        } else {
            self.bits[w] &= !(1u64 << b);
        }
        old
    }

    /// Sets or clears an edge. Idempotent; degree counts track actual flips.
    pub fn set_edge(&mut self, key: &SubsetKey, present: bool) -> Result<()> {
        self.validate_key(key)?;
        let rank = self.table.rank(key.vertices());
        let old = self.set_bit(rank, present);
        if old != present {
            for &v in key.vertices() {
                if present {
                    self.degrees[v] += 1;
                } else {
                    self.degrees[v] -= 1;
                }
            }
            if present {
                self.edge_count += 1;
            } else {
                self.edge_count -= 1;
            }
        }
        Ok(())
    }

    /// Fast internal edge insert by rank during sampling; decodes the rank
    /// to update degrees.
    pub(crate) fn set_edge_by_vertices(&mut self, vertices: &[usize]) {
        let rank = self.table.rank(vertices);
        let old = self.set_bit(rank, true);
        if !old {
            for &v in vertices {
                self.degrees[v] += 1;
            }
            self.edge_count += 1;
        }
    }

    pub fn has_edge(&self, key: &SubsetKey) -> Result<bool> {
        self.validate_key(key)?;
        Ok(self.has_bit(self.table.rank(key.vertices())))
    }

    /// Presence test for a strictly increasing vertex slice of arity m.
    #[inline]
    pub(crate) fn has_edge_slice(&self, vertices: &[usize]) -> bool {
        self.has_bit(self.table.rank(vertices))
    }

    pub fn degree(&self, v: usize) -> Result<u64> {
        if v >= self.n_vertices {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n_vertices: self.n_vertices,
            });
        }
        Ok(self.degrees[v])
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Visits every present edge in increasing colex rank order. The slice
    /// passed to the callback is the strictly increasing vertex set.
    pub fn for_each_edge<F: FnMut(&[usize])>(&self, mut f: F) {
        let mut scratch = vec![0usize; self.arity];
        for (wi, &word) in self.bits.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                let rank = (wi as u64) * 64 + b;
                self.unrank_into(rank, &mut scratch);
                f(&scratch);
            }
        }
    }

    /// Present edges in increasing colex rank order.
    pub fn edges(&self) -> Vec<SubsetKey> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        self.for_each_edge(|vs| {
            out.push(SubsetKey::new(vs.to_vec()).expect("edge slices are strictly increasing"));
        });
        out
    }

    fn unrank_into(&self, rank: u64, out: &mut [usize]) {
        let k = self.arity;
        let mut r = rank;
        let mut hi = self.n_vertices; // exclusive upper bound for the next component
        for j in (1..=k).rev() {
            // Largest s in [j-1, hi-1] with C(s, j) <= r via binary search.
            let mut lo_s = j - 1;
            let mut hi_s = hi - 1;
            while lo_s < hi_s {
                let mid = (lo_s + hi_s + 1) / 2;
                if self.table.get(mid, j) <= r {
                    lo_s = mid;
                } else {
                    hi_s = mid - 1;
                }
            }
            out[j - 1] = lo_s;
            r -= self.table.get(lo_s, j);
            hi = lo_s;
        }
    }

    /// Number of present edges entirely inside the vertex set `s`.
    /// Returns 0 when |s| < m. Rejects duplicates and out-of-range vertices.
    pub fn edges_within(&self, s: &[usize]) -> Result<u64> {
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSubset(format!(
                    "duplicate vertex {} in subset",
                    w[0]
                )));
            }
        }
        if let Some(&v) = sorted.last() {
            if v >= self.n_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n_vertices: self.n_vertices,
                });
            }
        }
        if sorted.len() < self.arity {
            return Ok(0);
        }
        let mut count = 0u64;
        let mut scratch = vec![0usize; self.arity];
        crate::combinatorics::for_each_colex_subset(sorted.len(), self.arity, |idx| {
            for (slot, &i) in scratch.iter_mut().zip(idx) {
                *slot = sorted[i];
            }
            if self.has_edge_slice(&scratch) {
                count += 1;
            }
        });
        Ok(count)
    }

    /// Applies a vertex relabeling: edge e is present in the result iff
    /// perm(e) was present here... i.e. result has edge {perm[v]} for each
    /// present edge {v}. `perm` must be a permutation of 0..N.
    pub fn relabel(&self, perm: &[usize]) -> Result<UniformHypergraph> {
        if perm.len() != self.n_vertices {
            return Err(Error::Domain(format!(
                "permutation length {} does not match vertex count {}",
                perm.len(),
                self.n_vertices
            )));
        }
        let mut seen = vec![false; self.n_vertices];
        for &p in perm {
            if p >= self.n_vertices || seen[p] {
                return Err(Error::Domain("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut out =
            UniformHypergraph::new_empty_with_capacity(self.n_vertices, self.arity, u64::MAX)?;
        let mut image = vec![0usize; self.arity];
        self.for_each_edge(|vs| {
            for (slot, &v) in image.iter_mut().zip(vs) {
                *slot = perm[v];
            }
            image.sort_unstable();
            out.set_edge_by_vertices(&image);
        });
        Ok(out)
    }

    /// Writes the edge-list text format: a header line, then one edge per
    /// line as m space-separated 1-based vertex ids in increasing order,
    /// edges in increasing colex rank order.
    pub fn write_edge_list<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# hypergraph N={} m={}", self.n_vertices, self.arity)?;
        let mut err = None;
        self.for_each_edge(|vs| {
            if err.is_some() {
                return;
            }
            let line = vs
                .iter()
                .map(|v| (v + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            if let Err(e) = writeln!(w, "{line}") {
                err = Some(e);
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    }

    /// Parses the edge-list text format. Rejects a malformed header,
    /// wrong-arity lines, out-of-range or non-increasing vertex ids, and
    /// duplicate edges.
    pub fn parse_edge_list<R: BufRead>(r: R) -> Result<UniformHypergraph> {
        let mut lines = r.lines();
        let header = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Parse("empty input, expected header line".into())),
            }
        };
        let rest = header
            .strip_prefix("# hypergraph ")
            .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?;
        let mut n_vertices = None;
        let mut arity = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("N=") {
                n_vertices = Some(v.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("bad N in header: {field:?}"))
                })?);
            } else if let Some(v) = field.strip_prefix("m=") {
                arity = Some(v.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("bad m in header: {field:?}"))
                })?);
            } else {
                return Err(Error::Parse(format!("unexpected header field: {field:?}")));
            }
        }
        let n_vertices =
            n_vertices.ok_or_else(|| Error::Parse("header missing N=<count>".into()))?;
        let arity = arity.ok_or_else(|| Error::Parse("header missing m=<arity>".into()))?;
        let mut g = UniformHypergraph::new_empty(n_vertices, arity)
            .map_err(|e| Error::Parse(format!("bad header parameters: {e}")))?;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut vertices = Vec::with_capacity(arity);
            for tok in trimmed.split_whitespace() {
                let id: usize = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad vertex id {tok:?}", lineno + 2))
                })?;
                if id == 0 || id > n_vertices {
                    return Err(Error::Parse(format!(
                        "line {}: vertex id {id} out of range 1..={n_vertices}",
                        lineno + 2
                    )));
                }
                vertices.push(id - 1);
            }
            if vertices.len() != arity {
                return Err(Error::Parse(format!(
                    "line {}: expected {arity} vertex ids, got {}",
                    lineno + 2,
                    vertices.len()
                )));
            }
            if vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "line {}: vertex ids must be strictly increasing",
                    lineno + 2
                )));
            }
            let key = SubsetKey::new(vertices).expect("checked increasing above");
            if g.has_edge(&key)? {
                return Err(Error::Parse(format!(
                    "line {}: duplicate edge",
                    lineno + 2
                )));
            }
            g.set_edge(&key, true)?;
        }
        Ok(g)
    }
}
