//! Exact subset counting, colexicographic subset indexing, and Bernoulli
//! Kullback-Leibler utilities. Everything downstream (edge storage, scan
//! statistics, analytic thresholds) sits on these primitives.

use crate::error::{Error, Result};

/// Exact binomial coefficient C(n, k) with overflow checking.
///
/// Returns 0 when k > n. Errors instead of wrapping when the result (or an
/// intermediate product) does not fit in u64.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step because the
        // running value is C(n, i+1) after dividing.
        let num = (acc as u128) * ((n - i) as u128);
        let q = num / ((i + 1) as u128);
        if q > u64::MAX as u128 {
            return Err(Error::Overflow { op: "binomial" });
        }
        acc = q as u64;
    }
    Ok(acc)
}

/// Falling factorial n (n-1) ... (n-k+1) with k factors.
///
/// Returns 1 when k = 0 and 0 when a factor reaches 0 (k > n).
pub fn falling_factorial(n: u64, k: u64) -> Result<u64> {
    let mut acc: u64 = 1;
    for i in 0..k {
        if i >= n {
            return Ok(0);
        }
        acc = acc
            .checked_mul(n - i)
            .ok_or(Error::Overflow { op: "falling_factorial" })?;
    }
    Ok(acc)
}

/// m! as u64 with overflow checking (m <= 20 fits).
pub fn factorial(m: u64) -> Result<u64> {
    falling_factorial(m, m)
}

/// A strictly increasing vertex subset, the canonical form for edges and
/// scan windows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetKey {
    vertices: Vec<usize>,
}

impl SubsetKey {
    /// Validates strict increase; rejects duplicates and unordered input.
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        for w in vertices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidSubset(format!(
                    "vertices must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(SubsetKey { vertices })
    }

    /// Sorts and validates; rejects duplicates.
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSubset(format!("duplicate vertex {}", w[0])));
            }
        }
        Ok(SubsetKey { vertices })
    }

    pub fn arity(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.vertices
    }
}

/// Colexicographic rank of a strictly increasing subset:
/// rank(s_0 < s_1 < ... < s_{k-1}) = sum_j C(s_j, j+1).
pub fn colex_rank(key: &SubsetKey) -> u64 {
    colex_rank_slice(key.vertices())
}

/// Rank for a strictly increasing slice (callers guarantee ordering).
pub(crate) fn colex_rank_slice(vertices: &[usize]) -> u64 {
    let mut rank: u64 = 0;
    for (j, &s) in vertices.iter().enumerate() {
        rank += binomial(s as u64, (j + 1) as u64)
            .expect("colex rank component overflows u64; subset is outside supported scale");
    }
    rank
}

/// Inverse of `colex_rank` for arity k: returns the unique strictly
/// increasing k-subset with the given rank.
pub fn colex_unrank(rank: u64, k: usize) -> SubsetKey {
    let mut vertices = vec![0usize; k];
    let mut r = rank;
    for j in (1..=k).rev() {
        // Largest s with C(s, j) <= r; search upward from the minimum s = j-1.
        let mut s = (j - 1) as u64;
        let mut c_s = 0u64; // C(j-1, j) = 0
        loop {
            // C(s+1, j) = C(s, j) * (s+1) / (s+1-j)
            let next = if c_s == 0 {
                1 // C(j, j)
            } else {
                ((c_s as u128) * ((s + 1) as u128) / ((s + 1 - j as u64) as u128)) as u64
            };
            if next > r {
                break;
            }
            s += 1;
            c_s = next;
        }
        vertices[j - 1] = s as usize;
        r -= c_s;
    }
    SubsetKey { vertices }
}

/// Visits every k-subset of {0, ..., n-1} in colexicographic order.
/// The slice passed to the callback is strictly increasing.
pub fn for_each_colex_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        f(&cur);
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            let limit = if j + 1 == k { n } else { cur[j + 1] };
            if cur[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        cur[j] += 1;
        for (i, slot) in cur.iter_mut().enumerate().take(j) {
            *slot = i;
        }
    }
}

/// Bernoulli Kullback-Leibler divergence
/// H_p(q) = q ln(q/p) + (1-q) ln((1-q)/(1-p)), with 0 ln 0 = 0.
///
/// Requires p in (0,1) and q in [0,1].
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("kl_bernoulli requires p in (0,1), got {p}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("kl_bernoulli requires q in [0,1], got {q}")));
    }
    let mut h = 0.0;
    if q > 0.0 {
        h += q * (q / p).ln();
    }
    if q < 1.0 {
        h += (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln();
    }
    Ok(h)
}

/// Absolute bisection tolerance for `kl_inverse_upper`.
pub const KL_INVERSE_TOL: f64 = 1e-12;
/// Iteration cap for `kl_inverse_upper`.
pub const KL_INVERSE_MAX_ITERS: u32 = 200;

/// Upper KL inverse: the largest q in [p, 1] with H_p(q) <= t.
///
/// H_p is continuous, strictly increasing on [p, 1] with H_p(p) = 0 and
/// H_p(1) = ln(1/p), so bisection converges; tolerance `KL_INVERSE_TOL`
/// in q, at most `KL_INVERSE_MAX_ITERS` halvings.
pub fn kl_inverse_upper(p: f64, t: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "kl_inverse_upper requires p in (0,1), got {p}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "kl_inverse_upper requires t >= 0, got {t}"
        )));
    }
    if t >= (1.0 / p).ln() {
        return Ok(1.0);
    }
    let mut lo = p;
    let mut hi = 1.0;
    let mut iters = 0;
    while hi - lo > KL_INVERSE_TOL && iters < KL_INVERSE_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if kl_bernoulli(p, mid)? <= t {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok(lo)
}

/// Precomputed Pascal triangle for hot paths (rank computations inside
/// scans and kernels). Entries that would overflow saturate to u64::MAX;
/// capacity-checked callers never reach them.
#[derive(Debug, Clone)]
pub(crate) struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(max_n: usize, max_k: usize) -> Self {
        let mut rows = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![0u64; max_k + 1];
            for (k, slot) in row.iter_mut().enumerate().take(max_k + 1) {
                if k == 0 {
                    *slot = 1;
                } else if k <= n {
                    let above: &Vec<u64> = &rows[n - 1];
                    *slot = above[k].saturating_add(above[k - 1]);
                }
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> u64 {
        self.rows[n][k]
    }

    /// Rank of a strictly increasing slice using table lookups.
    #[inline]
    pub fn rank(&self, vertices: &[usize]) -> u64 {
        let mut rank = 0u64;
        for (j, &s) in vertices.iter().enumerate() {
            rank += self.get(s, j + 1);
        }
        rank
    }
}
