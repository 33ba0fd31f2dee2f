//! Normalized 2-path statistics: the degree-variance form (difference of
//! two variance estimators) and the ordered tight-2-path form (sum of
//! centered indicator products over ordered (m+1)-tuples, computed exactly
//! through codegrees of (m-1)-sets).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{p0_hat, StatName, StatValue};
use crate::combinatorics::{binomial, factorial, falling_factorial, BinomialTable};
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;

/// Tuple-count guard for the brute-force ordered 2-path oracle.
pub const HT2PT_ORACLE_MAX_TUPLES: u64 = 100_000_000;

/// Normalizer for the empirical degree-variance term V2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum L2Denominator {
    /// Divide the centered square sum by N - m!.
    #[default]
    NMinusMFactorial,
    /// Divide the centered square sum by N - m.
    NMinusM,
}

impl L2Denominator {
    pub fn as_str(&self) -> &'static str {
        match self {
            L2Denominator::NMinusMFactorial => "n-minus-m-factorial",
            L2Denominator::NMinusM => "n-minus-m",
        }
    }
}

impl fmt::Display for L2Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for L2Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n-minus-m-factorial" => Ok(L2Denominator::NMinusMFactorial),
            "n-minus-m" => Ok(L2Denominator::NMinusM),
            other => Err(Error::Config(format!(
                "unknown V2 denominator {other:?}; expected n-minus-m-factorial or n-minus-m"
            ))),
        }
    }
}

fn v2_divisor(n: usize, m: usize, denom: L2Denominator) -> Result<f64> {
    let d = match denom {
        L2Denominator::NMinusMFactorial => {
            let mfac = factorial(m as u64)
                .map_err(|_| Error::Domain(format!("vertex count {n} must exceed m!")))?;
            n as f64 - mfac as f64
        }
        L2Denominator::NMinusM => n as f64 - m as f64,
    };
    if d <= 0.0 {
        return Err(Error::Domain(format!(
            "V2 denominator {denom} requires more vertices: N={n}, m={m}"
        )));
    }
    Ok(d)
}

/// The plug-in variance pair (V1, V2) of the ordered vertex star counts,
/// evaluated at edge rate `p`:
///   V1 = (m-1)! C(N-1, m-1) [C(N, m) / (C(N, m) - 1)] p (1 - p),
///   V2 = sum_v [(m-1)! d_v - (m-1)! C(N-1, m-1) p]^2 / divisor.
pub fn l2path_v1_v2(g: &UniformHypergraph, p: f64) -> Result<(f64, f64)> {
    l2path_v1_v2_with(g, p, L2Denominator::default())
}

/// As `l2path_v1_v2` with an explicit V2 divisor.
pub fn l2path_v1_v2_with(
    g: &UniformHypergraph,
    p: f64,
    denom: L2Denominator,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge rate must lie in [0, 1], got {p}")));
    }
    let n = g.n_vertices();
    let m = g.arity();
    let divisor = v2_divisor(n, m, denom)?;
    let cap = g.capacity() as f64;
    if g.capacity() < 2 {
        return Err(Error::Domain(format!(
            "V1 needs at least two potential edges, got C({n}, {m}) = {}",
            g.capacity()
        )));
    }
    let fac = factorial(m as u64 - 1)? as f64;
    let stars_per_vertex = binomial(n as u64 - 1, m as u64 - 1)? as f64;
    let v1 = fac * stars_per_vertex * (cap / (cap - 1.0)) * p * (1.0 - p);
    let center = fac * stars_per_vertex * p;
    let mut square_sum = 0.0;
    for &d in g.degrees() {
        let diff = fac * d as f64 - center;
        square_sum += diff * diff;
    }
    Ok((v1, square_sum / divisor))
}

/// Degree-variance 2-path statistic: (V2 - V1) / (N^{(2m-3)/2} p0_hat).
/// Empty and complete graphs are degenerate and report 0.
pub fn hl2pt_stat(g: &UniformHypergraph) -> Result<StatValue> {
    hl2pt_stat_with(g, L2Denominator::default())
}

/// As `hl2pt_stat` with an explicit V2 divisor.
pub fn hl2pt_stat_with(g: &UniformHypergraph, denom: L2Denominator) -> Result<StatValue> {
    let n = g.n_vertices();
    let m = g.arity();
    let phat = p0_hat(g);
    let (v1, v2) = l2path_v1_v2_with(g, phat, denom)?;
    let scale = (n as f64).powf((2 * m - 3) as f64 / 2.0);
    let degenerate = phat == 0.0 || phat == 1.0;
    let value = if degenerate { 0.0 } else { (v2 - v1) / (scale * phat) };
    let mut out = StatValue::new(StatName::Hl2pt, value)
        .with_aux("p0_hat", phat)
        .with_aux("scale", scale)
        .with_aux("v1", v1)
        .with_aux("v2", v2);
    out.degenerate = degenerate;
    Ok(out)
}

/// Centered ordered tight-2-path sum at edge rate `p`:
///   sum over codegree sets D of size m-1 of
///   (m-1)! [(k_D - M p)^2 - k_D (1 - p)^2 - (M - k_D) p^2],  M = N - m + 1.
/// Equals the literal ordered (m+1)-tuple sum (`ht2pt_numerator_oracle`).
fn ht2pt_numerator(g: &UniformHypergraph, p: f64) -> Result<f64> {
    let n = g.n_vertices();
    let m = g.arity();
    let slots = binomial(n as u64, m as u64 - 1)?;
    let slots = usize::try_from(slots).map_err(|_| Error::Overflow { op: "codegree table" })?;
    let table = BinomialTable::new(n.max(1), m);
    let mut codegree = vec![0u32; slots];
    let mut dropped = vec![0usize; m - 1];
    g.for_each_edge(|e| {
        for skip in 0..m {
            let mut t = 0;
            for (i, &v) in e.iter().enumerate() {
                if i != skip {
                    dropped[t] = v;
                    t += 1;
                }
            }
            codegree[table.rank(&dropped) as usize] += 1;
        }
    });
    let completions = (n - m + 1) as f64;
    let q = 1.0 - p;
    let mut sum = 0.0;
    for &k in &codegree {
        let k = k as f64;
        let centered = k - completions * p;
        sum += centered * centered - k * q * q - (completions - k) * p * p;
    }
    Ok(factorial(m as u64 - 1)? as f64 * sum)
}

/// Ordered tight-2-path statistic: the centered tuple sum at the plug-in
/// rate, over sqrt((m+1)! C(N, m+1)) p0_hat (1 - p0_hat). Empty and
/// complete graphs are degenerate and report 0.
pub fn ht2pt_stat(g: &UniformHypergraph) -> Result<StatValue> {
    let n = g.n_vertices();
    let m = g.arity();
    if n < m + 1 {
        return Err(Error::Domain(format!(
            "ordered 2-path statistic needs N >= m + 1, got N={n}, m={m}"
        )));
    }
    let phat = p0_hat(g);
    let num = ht2pt_numerator(g, phat)?;
    let degenerate = phat == 0.0 || phat == 1.0;
    let value = if degenerate {
        0.0
    } else {
        let scale = (factorial(m as u64 + 1)? as f64 * binomial(n as u64, m as u64 + 1)? as f64)
            .sqrt();
        num / (scale * phat * (1.0 - phat))
    };
    let mut out = StatValue::new(StatName::Ht2pt, value)
        .with_aux("numerator", num)
        .with_aux("p0_hat", phat);
    out.degenerate = degenerate;
    Ok(out)
}

/// Literal ordered (m+1)-tuple sum of (eta_first - p)(eta_last - p), where
/// eta_first and eta_last indicate the leading and trailing m-windows being
/// edges. Guarded by `HT2PT_ORACLE_MAX_TUPLES`.
pub fn ht2pt_numerator_oracle(g: &UniformHypergraph, p: f64) -> Result<f64> {
    let n = g.n_vertices();
    let m = g.arity();
    if n < m + 1 {
        return Err(Error::Domain(format!(
            "ordered 2-path oracle needs N >= m + 1, got N={n}, m={m}"
        )));
    }
    let tuples = falling_factorial(n as u64, m as u64 + 1)?;
    if tuples > HT2PT_ORACLE_MAX_TUPLES {
        return Err(Error::BudgetExceeded {
            needed: tuples,
            budget: HT2PT_ORACLE_MAX_TUPLES,
        });
    }
    let mut tuple = vec![0usize; m + 1];
    let mut used = vec![false; n];
    let mut sum = 0.0;
    let mut window = vec![0usize; m];
    fn descend(
        g: &UniformHypergraph,
        p: f64,
        depth: usize,
        tuple: &mut [usize],
        used: &mut [bool],
        window: &mut [usize],
        sum: &mut f64,
    ) {
        if depth == tuple.len() {
            window.copy_from_slice(&tuple[..tuple.len() - 1]);
            window.sort_unstable();
            let first = if g.has_edge_slice(window) { 1.0 } else { 0.0 };
            window.copy_from_slice(&tuple[1..]);
            window.sort_unstable();
            let last = if g.has_edge_slice(window) { 1.0 } else { 0.0 };
            *sum += (first - p) * (last - p);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                tuple[depth] = v;
                descend(g, p, depth + 1, tuple, used, window, sum);
                used[v] = false;
            }
        }
    }
    descend(g, p, 0, &mut tuple, &mut used, &mut window, &mut sum);
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::SubsetKey;
    use crate::models::{sample_null, NullModel, RngStream};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn graph(n: usize, m: usize, edges: &[&[usize]]) -> UniformHypergraph {
        let mut g = UniformHypergraph::new_empty(n, m).unwrap();
        for e in edges {
            g.set_edge(&SubsetKey::new(e.to_vec()).unwrap(), true).unwrap();
        }
        g
    }

    #[test]
    fn path_graph_worked_values() {
        let g = graph(3, 2, &[&[0, 1], &[1, 2]]);
        for denom in [L2Denominator::NMinusMFactorial, L2Denominator::NMinusM] {
            let (v1, v2) = l2path_v1_v2_with(&g, p0_hat(&g), denom).unwrap();
            assert_abs_diff_eq!(v1, 2.0 / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v2, 2.0 / 3.0, epsilon = 1e-12);
            let t1 = hl2pt_stat_with(&g, denom).unwrap();
            assert_abs_diff_eq!(t1.value, 0.0, epsilon = 1e-12);
            assert!(!t1.degenerate);
        }
        let t2 = ht2pt_stat(&g).unwrap();
        assert_abs_diff_eq!(t2.aux["numerator"], -2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t2.value, -1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn zigzag_worked_value() {
        let g = graph(4, 2, &[&[0, 1], &[1, 2], &[2, 3]]);
        let t1 = hl2pt_stat(&g).unwrap();
        assert_abs_diff_eq!(t1.aux["v1"], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(t1.aux["v2"], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t1.value, -0.4, epsilon = 1e-12);
    }

    #[test]
    fn three_uniform_path_worked_value() {
        let g = graph(4, 3, &[&[0, 1, 2], &[1, 2, 3]]);
        let t2 = ht2pt_stat(&g).unwrap();
        assert_abs_diff_eq!(t2.aux["numerator"], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t2.value, -1.632993161855452, epsilon = 1e-12);
    }

    #[test]
    fn triangle_raw_two_path_count() {
        let g = graph(3, 2, &[&[0, 1], &[0, 2], &[1, 2]]);
        assert_abs_diff_eq!(ht2pt_numerator_oracle(&g, 0.0).unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ht2pt_numerator(&g, 0.0).unwrap(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_matches_tuple_oracle() {
        for (n, m, p) in [(7usize, 2usize, 0.4f64), (7, 3, 0.3), (6, 4, 0.5)] {
            let model = NullModel::new(n, m, p).unwrap();
            for r in 0..6u64 {
                let g = sample_null(&model, &RngStream::new(900, r)).unwrap();
                let phat = p0_hat(&g);
                for rate in [phat, 0.0, 0.25] {
                    assert_relative_eq!(
                        ht2pt_numerator(&g, rate).unwrap(),
                        ht2pt_numerator_oracle(&g, rate).unwrap(),
                        epsilon = 1e-9,
                        max_relative = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn pairwise_v2_is_degree_variance() {
        let model = NullModel::new(10, 2, 0.45).unwrap();
        let g = sample_null(&model, &RngStream::new(31, 2)).unwrap();
        let (_, v2) = l2path_v1_v2_with(&g, p0_hat(&g), L2Denominator::NMinusM).unwrap();
        let mean =
            g.degrees().iter().map(|&d| d as f64).sum::<f64>() / g.n_vertices() as f64;
        let direct: f64 = g
            .degrees()
            .iter()
            .map(|&d| (d as f64 - mean) * (d as f64 - mean))
            .sum::<f64>()
            / (g.n_vertices() as f64 - 2.0);
        assert_relative_eq!(v2, direct, epsilon = 1e-10, max_relative = 1e-10);
    }

    #[test]
    fn divisor_switch_rescales_v2() {
        let model = NullModel::new(9, 3, 0.35).unwrap();
        let g = sample_null(&model, &RngStream::new(77, 0)).unwrap();
        let p = p0_hat(&g);
        let (v1a, v2a) = l2path_v1_v2_with(&g, p, L2Denominator::NMinusMFactorial).unwrap();
        let (v1b, v2b) = l2path_v1_v2_with(&g, p, L2Denominator::NMinusM).unwrap();
        assert_abs_diff_eq!(v1a, v1b, epsilon = 1e-12);
        assert_relative_eq!(v2a * (9.0 - 6.0), v2b * (9.0 - 3.0), epsilon = 1e-10);
    }

    #[test]
    fn degenerate_graphs_report_zero() {
        let empty = graph(6, 2, &[]);
        let t1 = hl2pt_stat(&empty).unwrap();
        assert!(t1.degenerate);
        assert_eq!(t1.value, 0.0);
        let t2 = ht2pt_stat(&empty).unwrap();
        assert!(t2.degenerate);
        assert_eq!(t2.value, 0.0);

        let mut full = graph(5, 2, &[]);
        for i in 0..5 {
            for j in (i + 1)..5 {
                full.set_edge(&SubsetKey::new(vec![i, j]).unwrap(), true).unwrap();
            }
        }
        assert!(hl2pt_stat(&full).unwrap().degenerate);
        assert!(ht2pt_stat(&full).unwrap().degenerate);
    }

    #[test]
    fn values_are_permutation_invariant() {
        let model = NullModel::new(9, 3, 0.4).unwrap();
        let g = sample_null(&model, &RngStream::new(55, 1)).unwrap();
        let perm = [4, 7, 1, 0, 8, 2, 6, 3, 5];
        let h = g.relabel(&perm).unwrap();
        assert_relative_eq!(
            hl2pt_stat(&g).unwrap().value,
            hl2pt_stat(&h).unwrap().value,
            epsilon = 1e-10,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            ht2pt_stat(&g).unwrap().value,
            ht2pt_stat(&h).unwrap().value,
            epsilon = 1e-10,
            max_relative = 1e-10
        );
    }

    #[test]
    fn preconditions_are_enforced() {
        // N = m! is too small for the default divisor but fine for N - m.
        let g = graph(6, 3, &[&[0, 1, 2]]);
        assert!(matches!(hl2pt_stat(&g), Err(Error::Domain(_))));
        assert!(hl2pt_stat_with(&g, L2Denominator::NMinusM).is_ok());
        assert!(matches!(
            l2path_v1_v2(&g, 1.5),
            Err(Error::Domain(_))
        ));

        let tight = graph(3, 3, &[&[0, 1, 2]]);
        assert!(matches!(ht2pt_stat(&tight), Err(Error::Domain(_))));
    }

    #[test]
    fn oracle_budget_guard() {
        let g = graph(500, 2, &[]);
        assert!(matches!(
            ht2pt_numerator_oracle(&g, 0.1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn denominator_names_round_trip() {
        for d in [L2Denominator::NMinusMFactorial, L2Denominator::NMinusM] {
            assert_eq!(d.as_str().parse::<L2Denominator>().unwrap(), d);
        }
        assert!("n-m".parse::<L2Denominator>().is_err());
    }
}
