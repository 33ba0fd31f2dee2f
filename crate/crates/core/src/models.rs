//! Random hypergraph models and reproducible sampling.
//!
//! Sampling draws one uniform per potential edge in increasing colex rank
//! order, so a (master seed, stream id) pair pins the sampled hypergraph
//! exactly, independent of platform or thread schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binomial, for_each_colex_subset};
use crate::error::{Error, Result};
use crate::hypergraph::UniformHypergraph;

/// Erdos-Renyi m-uniform null model H_m(N, p0).
#[derive(Debug, Clone, PartialEq)]
pub struct NullModel {
    n_vertices: usize,
    arity: usize,
    p0: f64,
}

impl NullModel {
    /// Requires 2 <= m <= N and p0 in (0, 1].
    pub fn new(n_vertices: usize, arity: usize, p0: f64) -> Result<Self> {
        if arity < 2 || arity > n_vertices {
            return Err(Error::Construction(format!(
                "need 2 <= m <= N, got m={arity}, N={n_vertices}"
            )));
        }
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(Error::Construction(format!(
                "need p0 in (0, 1], got {p0}"
            )));
        }
        Ok(NullModel { n_vertices, arity, p0 })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }
}

/// Planted dense subhypergraph model H_m(N, p0; n, p1): edges inside the
/// planted n-set appear with rate p1, all others with rate p0.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedModel {
    n_vertices: usize,
    arity: usize,
    planted_size: usize,
    p0: f64,
    p1: f64,
    planted: Vec<usize>,
}

impl PlantedModel {
    /// Planted set defaults to {0, ..., n-1}.
    ///
    /// Requires m <= n <= N and 0 < p0 <= p1 <= 1. Equal rates are allowed
    /// (the model then coincides with the null), as is p1 = 1 (planted
    /// clique).
    pub fn new(
        n_vertices: usize,
        arity: usize,
        planted_size: usize,
        p0: f64,
        p1: f64,
    ) -> Result<Self> {
        if arity < 2 || arity > n_vertices {
            return Err(Error::Construction(format!(
                "need 2 <= m <= N, got m={arity}, N={n_vertices}"
            )));
        }
        if planted_size < arity || planted_size > n_vertices {
            return Err(Error::Construction(format!(
                "need m <= n <= N, got n={planted_size}, m={arity}, N={n_vertices}"
            )));
        }
        if !(p0 > 0.0 && p0 <= p1 && p1 <= 1.0) {
            return Err(Error::Construction(format!(
                "need 0 < p0 <= p1 <= 1, got p0={p0}, p1={p1}"
            )));
        }
        Ok(PlantedModel {
            n_vertices,
            arity,
            planted_size,
            p0,
            p1,
            planted: (0..planted_size).collect(),
        })
    }

    /// Replaces the planted set; must have exactly n distinct in-range
    /// vertices.
    pub fn with_planted_set(mut self, planted: Vec<usize>) -> Result<Self> {
        let mut sorted = planted;
        sorted.sort_unstable();
        if sorted.len() != self.planted_size {
            return Err(Error::Construction(format!(
                "planted set size {} does not match n={}",
                sorted.len(),
                self.planted_size
            )));
        }
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Construction(format!(
                    "duplicate vertex {} in planted set",
                    w[0]
                )));
            }
        }
        if let Some(&v) = sorted.last() {
            if v >= self.n_vertices {
                return Err(Error::Construction(format!(
                    "planted vertex {v} out of range for N={}",
                    self.n_vertices
                )));
            }
        }
        self.planted = sorted;
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn planted_size(&self) -> usize {
        self.planted_size
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn planted(&self) -> &[usize] {
        &self.planted
    }

    /// The null model with the same (N, m, p0).
    pub fn null(&self) -> NullModel {
        NullModel {
            n_vertices: self.n_vertices,
            arity: self.arity,
            p0: self.p0,
        }
    }
}

/// A reproducible random stream addressed by (master seed, stream id).
///
/// Frozen derivation: the generator is ChaCha8 with its 256-bit key filled
/// from `master_seed` by SplitMix64 expansion (rand's `seed_from_u64`) and
/// its 64-bit stream counter set to `stream_id`. Distinct stream ids under
/// one master seed yield independent, non-overlapping streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Convenience constructor matching the (master seed, stream id) layout.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    RngStream::new(master_seed, stream_id)
}

/// Samples the null model, consuming exactly C(N, m) uniforms from `rng`
/// in colex edge order.
pub fn sample_null_with<R: Rng>(model: &NullModel, rng: &mut R) -> Result<UniformHypergraph> {
    let mut g = UniformHypergraph::new_empty(model.n_vertices, model.arity)?;
    let p0 = model.p0;
    for_each_colex_subset(model.n_vertices, model.arity, |vs| {
        let u: f64 = rng.gen();
        if u < p0 {
            g.set_edge_by_vertices(vs);
        }
    });
    Ok(g)
}

pub fn sample_null(model: &NullModel, stream: &RngStream) -> Result<UniformHypergraph> {
    let mut rng = stream.rng();
    sample_null_with(model, &mut rng)
}

/// Samples the planted model, consuming exactly C(N, m) uniforms from
/// `rng` in colex edge order (one per potential edge, planted or not).
pub fn sample_planted_with<R: Rng>(
    model: &PlantedModel,
    rng: &mut R,
) -> Result<UniformHypergraph> {
    let mut g = UniformHypergraph::new_empty(model.n_vertices, model.arity)?;
    let mut in_planted = vec![false; model.n_vertices];
    for &v in &model.planted {
        in_planted[v] = true;
    }
    let (p0, p1) = (model.p0, model.p1);
    for_each_colex_subset(model.n_vertices, model.arity, |vs| {
        let u: f64 = rng.gen();
        let rate = if vs.iter().all(|&v| in_planted[v]) { p1 } else { p0 };
        if u < rate {
            g.set_edge_by_vertices(vs);
        }
    });
    Ok(g)
}

pub fn sample_planted(model: &PlantedModel, stream: &RngStream) -> Result<UniformHypergraph> {
    let mut rng = stream.rng();
    sample_planted_with(model, &mut rng)
}

/// Background rate p0' that matches the expected total edge count of the
/// planted model:
///
///   p0' = (C(N,m) p0 - C(n,m) p1) / (C(N,m) - C(n,m))
///       = p0 - C(n,m) (p1 - p0) / (C(N,m) - C(n,m))
///
/// computed in the second (cancellation-free) form. Errors when the
/// calibrated rate is not positive.
pub fn calibrated_background(
    n_vertices: usize,
    arity: usize,
    planted_size: usize,
    p0: f64,
    p1: f64,
) -> Result<f64> {
    if arity < 2 || arity > planted_size || planted_size >= n_vertices {
        return Err(Error::Domain(format!(
            "need 2 <= m <= n < N, got m={arity}, n={planted_size}, N={n_vertices}"
        )));
    }
    if !(p0 > 0.0 && p0 <= p1 && p1 <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < p0 <= p1 <= 1, got p0={p0}, p1={p1}"
        )));
    }
    let big = binomial(n_vertices as u64, arity as u64)? as f64;
    let small = binomial(planted_size as u64, arity as u64)? as f64;
    let p0_prime = p0 - small * (p1 - p0) / (big - small);
    if p0_prime <= 0.0 {
        return Err(Error::CalibrationInfeasible(format!(
            "calibrated background rate {p0_prime} <= 0 for N={n_vertices}, m={arity}, \
             n={planted_size}, p0={p0}, p1={p1}"
        )));
    }
    Ok(p0_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn model_validation() {
        assert!(NullModel::new(10, 2, 0.5).is_ok());
        assert!(NullModel::new(10, 2, 1.0).is_ok());
        assert!(NullModel::new(10, 1, 0.5).is_err());
        assert!(NullModel::new(2, 3, 0.5).is_err());
        assert!(NullModel::new(10, 2, 0.0).is_err());
        assert!(NullModel::new(10, 2, 1.5).is_err());

        assert!(PlantedModel::new(10, 3, 5, 0.2, 0.8).is_ok());
        assert!(PlantedModel::new(10, 3, 5, 0.2, 0.2).is_ok());
        assert!(PlantedModel::new(10, 3, 5, 0.2, 1.0).is_ok());
        assert!(PlantedModel::new(10, 3, 2, 0.2, 0.8).is_err());
        assert!(PlantedModel::new(10, 3, 11, 0.2, 0.8).is_err());
        assert!(PlantedModel::new(10, 3, 5, 0.8, 0.2).is_err());
        assert!(PlantedModel::new(10, 3, 5, 0.0, 0.5).is_err());
    }

    #[test]
    fn planted_set_override() {
        let m = PlantedModel::new(8, 2, 3, 0.1, 0.9).unwrap();
        assert_eq!(m.planted(), &[0, 1, 2]);
        let m = m.with_planted_set(vec![7, 2, 4]).unwrap();
        assert_eq!(m.planted(), &[2, 4, 7]);
        let bad = PlantedModel::new(8, 2, 3, 0.1, 0.9).unwrap();
        assert!(bad.clone().with_planted_set(vec![1, 2]).is_err());
        assert!(bad.clone().with_planted_set(vec![1, 1, 2]).is_err());
        assert!(bad.with_planted_set(vec![1, 2, 8]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let model = NullModel::new(12, 3, 0.4).unwrap();
        let a = sample_null(&model, &RngStream::new(7, 3)).unwrap();
        let b = sample_null(&model, &RngStream::new(7, 3)).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = sample_null(&model, &RngStream::new(7, 4)).unwrap();
        let d = sample_null(&model, &RngStream::new(8, 3)).unwrap();
        // Different stream or master seed gives a different draw (w.h.p.).
        assert!(a.edges() != c.edges() || a.edges() != d.edges());
    }

    #[test]
    fn extreme_rates() {
        let full = NullModel::new(6, 3, 1.0).unwrap();
        let g = sample_null(&full, &RngStream::new(1, 0)).unwrap();
        assert_eq!(g.edge_count(), g.capacity());

        let clique = PlantedModel::new(8, 2, 4, 1e-12, 1.0)
            .unwrap()
            .with_planted_set(vec![1, 3, 5, 7])
            .unwrap();
        let g = sample_planted(&clique, &RngStream::new(2, 0)).unwrap();
        assert_eq!(g.edges_within(&[1, 3, 5, 7]).unwrap(), 6);
    }

    #[test]
    fn planted_with_n_equal_big_n_matches_null_at_p1() {
        // Same stream: the draw sequence is identical, so the graphs match
        // edge for edge.
        let planted = PlantedModel::new(9, 2, 9, 0.3, 0.7).unwrap();
        let null_at_p1 = NullModel::new(9, 2, 0.7).unwrap();
        let s = RngStream::new(11, 5);
        let a = sample_planted(&planted, &s).unwrap();
        let b = sample_null(&null_at_p1, &s).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn calibration_identity_and_worked_value() {
        // Worked value: (10, 2, 4, 0.2, 0.8) -> 4.2/39.
        let p = calibrated_background(10, 2, 4, 0.2, 0.8).unwrap();
        assert_abs_diff_eq!(p, 4.2 / 39.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.107692308, epsilon = 1e-9);
    }

    #[test]
    fn calibration_edge_cases() {
        // Equal rates calibrate to p0 exactly.
        assert_eq!(calibrated_background(10, 2, 4, 0.2, 0.2).unwrap(), 0.2);
        // Identity: C(N,m) p0 = C(n,m) p1 + (C(N,m) - C(n,m)) p0'.
        for (n_big, m, n, p0, p1) in [
            (12usize, 2usize, 5usize, 0.3, 0.9),
            (15, 3, 7, 0.25, 0.75),
            (9, 4, 6, 0.5, 0.5),
        ] {
            let p0p = calibrated_background(n_big, m, n, p0, p1).unwrap();
            let big = binomial(n_big as u64, m as u64).unwrap() as f64;
            let small = binomial(n as u64, m as u64).unwrap() as f64;
            assert_abs_diff_eq!(
                big * p0,
                small * p1 + (big - small) * p0p,
                epsilon = 1e-9 * big
            );
        }
        // Infeasible: planted mass exceeds total expected mass.
        assert!(matches!(
            calibrated_background(6, 2, 5, 0.01, 1.0),
            Err(Error::CalibrationInfeasible(_))
        ));
        assert!(calibrated_background(6, 2, 6, 0.2, 0.8).is_err());
    }

    /// Two-sample Kolmogorov-Smirnov distance between integer samples.
    fn ks_distance(a: &[u64], b: &[u64]) -> f64 {
        let max = *a.iter().chain(b.iter()).max().unwrap() as usize;
        let mut ca = vec![0f64; max + 2];
        let mut cb = vec![0f64; max + 2];
        for &x in a {
            ca[x as usize + 1] += 1.0;
        }
        for &x in b {
            cb[x as usize + 1] += 1.0;
        }
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let mut d: f64 = 0.0;
        let (mut sa, mut sb) = (0.0, 0.0);
        for i in 0..max + 2 {
            sa += ca[i];
            sb += cb[i];
            d = d.max((sa / na - sb / nb).abs());
        }
        d
    }

    #[test]
    fn planted_equal_rates_indistinguishable_from_null() {
        // KS two-sample test on edge counts at level 0.01; the critical
        // value for n1 = n2 = 5000 is c(0.01) sqrt(2/5000) = 0.0326.
        let reps = 5000;
        let null = NullModel::new(12, 2, 0.35).unwrap();
        let planted = PlantedModel::new(12, 2, 6, 0.35, 0.35).unwrap();
        let mut null_counts = Vec::with_capacity(reps);
        let mut planted_counts = Vec::with_capacity(reps);
        for r in 0..reps as u64 {
            null_counts.push(
                sample_null(&null, &RngStream::new(1000, r)).unwrap().edge_count(),
            );
            planted_counts.push(
                sample_planted(&planted, &RngStream::new(2000, r))
                    .unwrap()
                    .edge_count(),
            );
        }
        let d = ks_distance(&null_counts, &planted_counts);
        assert!(
            d < 0.0326,
            "KS distance {d} exceeds the 1% critical value; equal-rate planted \
             sampling deviates from the null"
        );
    }
}
