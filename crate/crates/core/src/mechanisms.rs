//! Randomized mechanisms that release information about a graph.
//!
//! Discrete mechanisms expose their exact output law row by row through
//! [`DiscreteMechanism`], which is what the auditors consume: auditing never
//! relies on sampling. The Laplace edge-count release is continuous and gets
//! its own concrete type with closed-form densities; the grid auditors in
//! [`crate::audit`] handle it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::{edge_slots, Graph, DEFAULT_ENUMERATION_CAP};
use crate::math;
use crate::rng::SeededRng;

/// A mechanism with a finite output alphabet and a computable output law.
///
/// Outputs are identified by their index in `0..alphabet_len()`. For
/// graph-valued mechanisms the index is the output graph's bit mask.
pub trait DiscreteMechanism {
    fn vertex_count(&self) -> u32;
    fn alphabet_len(&self) -> usize;
    /// Exact output law on input `g`; panics if `g` has the wrong vertex
    /// count (callers pair mechanisms and graphs via `vertex_count`).
    fn output_pmf(&self, g: &Graph) -> Vec<f64>;
    /// The privacy level the mechanism was configured for, if any.
    fn nominal_epsilon(&self) -> Option<f64>;
}

/// One inverse-CDF draw from `mech`'s output law on `g`, walking output
/// indices in ascending order.
pub fn sample_output(mech: &dyn DiscreteMechanism, g: &Graph, rng: &mut SeededRng) -> usize {
    let pmf = mech.output_pmf(g);
    let u = rng.next_f64();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (idx, &p) in pmf.iter().enumerate() {
        if p > 0.0 {
            last_positive = idx;
            acc += p;
            if u < acc {
                return idx;
            }
        }
    }
    last_positive
}

/// Randomized response applied to every edge indicator independently: each
/// of the C(n,2) bits is flipped with probability `p` before release.
///
/// The output alphabet is the whole graph space, so construction is capped
/// at [`DEFAULT_ENUMERATION_CAP`] vertices; beyond that a single output law
/// row no longer fits in memory anyway.
#[derive(Clone, Debug)]
pub struct RandomizedResponseEdges {
    n: u32,
    flip_prob: f64,
    /// flip_pows[d] * keep_pows[m - d] = probability of a fixed output at
    /// Hamming distance d from the input.
    flip_pows: Vec<f64>,
    keep_pows: Vec<f64>,
}

impl RandomizedResponseEdges {
    /// Requires `p` strictly inside (0, 1/2): flipping must be possible but
    /// less likely than keeping, so the released graph still favors the
    /// truth.
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::InvalidParameter { what: "flip probability must lie in (0, 1/2)" });
        }
        // Same guard as exhaustive enumeration: the alphabet is 2^C(n,2).
        crate::graphs::enumerate_graphs_with_cap(n, DEFAULT_ENUMERATION_CAP)?;
        let m = edge_slots(n);
        let mut flip_pows = Vec::with_capacity(m + 1);
        let mut keep_pows = Vec::with_capacity(m + 1);
        let (mut fp, mut kp) = (1.0, 1.0);
        for _ in 0..=m {
            flip_pows.push(fp);
            keep_pows.push(kp);
            fp *= p;
            kp *= 1.0 - p;
        }
        Ok(RandomizedResponseEdges { n, flip_prob: p, flip_pows, keep_pows })
    }

    /// Choose `p` so the per-edge log-odds ratio equals `epsilon`:
    /// `p = 1 / (1 + e^epsilon)`.
    pub fn from_epsilon(n: u32, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter { what: "epsilon must be positive and finite" });
        }
        Self::new(n, 1.0 / (1.0 + math::exp(epsilon)))
    }

    pub fn flip_prob(&self) -> f64 {
        self.flip_prob
    }

    /// Probability of releasing `h` on input `g`:
    /// `p^d (1-p)^(C(n,2)-d)` with `d` the symmetric difference size.
    pub fn pmf_at(&self, g: &Graph, h: &Graph) -> Result<f64> {
        let d = crate::graphs::symmetric_difference_size(g, h)?;
        if g.n() != self.n {
            return Err(Error::VertexCountMismatch { left: self.n, right: g.n() });
        }
        Ok(self.flip_pows[d] * self.keep_pows[edge_slots(self.n) - d])
    }
}

impl DiscreteMechanism for RandomizedResponseEdges {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn alphabet_len(&self) -> usize {
        1usize << edge_slots(self.n)
    }

    fn output_pmf(&self, g: &Graph) -> Vec<f64> {
        assert_eq!(g.n(), self.n, "graph vertex count must match the mechanism");
        let m = edge_slots(self.n);
        let gm = g.mask64();
        (0..1u64 << m)
            .map(|h| {
                let d = (gm ^ h).count_ones() as usize;
                self.flip_pows[d] * self.keep_pows[m - d]
            })
            .collect()
    }

    /// ln((1-p)/p), the exact per-edge log-odds ratio.
    fn nominal_epsilon(&self) -> Option<f64> {
        Some(math::ln((1.0 - self.flip_prob) / self.flip_prob))
    }
}

/// Ignores its input entirely; the perfectly private baseline.
#[derive(Clone, Debug)]
pub struct ConstantMechanism {
    n: u32,
    law: Vec<f64>,
}

impl ConstantMechanism {
    /// `law` must be a probability vector (within 1e-9 of summing to 1); it
    /// is renormalized exactly on construction.
    pub fn new(n: u32, law: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
        }
        if law.is_empty() {
            return Err(Error::InvalidDistribution { what: "constant law must be nonempty" });
        }
        if law.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution { what: "law entry is negative or non-finite" });
        }
        let sum: f64 = law.iter().sum();
        if math::abs(sum - 1.0) > 1e-9 {
            return Err(Error::InvalidDistribution { what: "constant law must sum to 1" });
        }
        let law = law.iter().map(|p| p / sum).collect();
        Ok(ConstantMechanism { n, law })
    }
}

impl DiscreteMechanism for ConstantMechanism {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn alphabet_len(&self) -> usize {
        self.law.len()
    }

    fn output_pmf(&self, g: &Graph) -> Vec<f64> {
        assert_eq!(g.n(), self.n, "graph vertex count must match the mechanism");
        self.law.clone()
    }

    fn nominal_epsilon(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Releases the input graph verbatim; the zero-privacy baseline.
#[derive(Clone, Debug)]
pub struct IdentityMechanism {
    n: u32,
}

impl IdentityMechanism {
    pub fn new(n: u32) -> Result<Self> {
        crate::graphs::enumerate_graphs_with_cap(n, DEFAULT_ENUMERATION_CAP)?;
        Ok(IdentityMechanism { n })
    }
}

impl DiscreteMechanism for IdentityMechanism {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn alphabet_len(&self) -> usize {
        1usize << edge_slots(self.n)
    }

    fn output_pmf(&self, g: &Graph) -> Vec<f64> {
        assert_eq!(g.n(), self.n, "graph vertex count must match the mechanism");
        let mut pmf = vec![0.0; self.alphabet_len()];
        pmf[g.mask64() as usize] = 1.0;
        pmf
    }

    fn nominal_epsilon(&self) -> Option<f64> {
        None
    }
}

/// Releases the edge count plus Laplace(1/epsilon) noise.
///
/// Adding or removing one edge changes the count by exactly 1, so the
/// release satisfies `epsilon`-edge-DP with equality approached at outputs
/// far from both counts.
#[derive(Clone, Copy, Debug)]
pub struct LaplaceEdgeCount {
    epsilon: f64,
    // ln(epsilon / 2), cached: grid audits evaluate the log density
    // billions of times.
    log_norm: f64,
}

impl LaplaceEdgeCount {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter { what: "epsilon must be positive and finite" });
        }
        Ok(LaplaceEdgeCount { epsilon, log_norm: math::ln(epsilon / 2.0) })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Noise scale b = sensitivity / epsilon.
    pub fn scale(&self) -> f64 {
        1.0 / self.epsilon
    }

    /// Worst-case change of the edge count between neighbors.
    pub fn sensitivity(&self) -> f64 {
        1.0
    }

    /// Output density at `y` when the true edge count is `count`:
    /// (epsilon/2) e^{-epsilon |y - count|}.
    pub fn density_for_count(&self, count: usize, y: f64) -> f64 {
        math::exp(self.log_density_for_count(count, y))
    }

    pub fn log_density_for_count(&self, count: usize, y: f64) -> f64 {
        self.log_norm - self.epsilon * math::abs(y - count as f64)
    }

    pub fn density(&self, g: &Graph, y: f64) -> f64 {
        self.density_for_count(g.edge_count(), y)
    }

    pub fn log_density(&self, g: &Graph, y: f64) -> f64 {
        self.log_density_for_count(g.edge_count(), y)
    }

    /// Draw |E(g)| + Laplace(0, 1/epsilon) by inverse CDF; one RNG step.
    pub fn sample(&self, g: &Graph, rng: &mut SeededRng) -> f64 {
        let u = rng.next_f64();
        let noise = if u < 0.5 {
            self.scale() * math::ln(2.0 * u)
        } else {
            -self.scale() * math::ln(2.0 * (1.0 - u))
        };
        g.edge_count() as f64 + noise
    }

    /// Noisy edge density: the noisy count divided by C(n,2). Needs at
    /// least one pair slot, i.e. n >= 2.
    pub fn noisy_density(&self, g: &Graph, rng: &mut SeededRng) -> Result<f64> {
        let slots = g.edge_slots();
        if slots == 0 {
            return Err(Error::InvalidParameter { what: "noisy density needs n >= 2" });
        }
        Ok(self.sample(g, rng) / slots as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{enumerate_graphs, neighbors, EdgeIndex};

    #[test]
    fn rr_rows_are_probability_vectors() {
        for n in [3, 4] {
            let mech = RandomizedResponseEdges::new(n, 0.3).unwrap();
            for g in enumerate_graphs(n).unwrap() {
                let pmf = mech.output_pmf(&g);
                assert_eq!(pmf.len(), mech.alphabet_len());
                let sum: f64 = pmf.iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "n={n} sum={sum}");
                assert!(pmf.iter().all(|p| *p > 0.0));
            }
        }
    }

    #[test]
    fn rr_near_zero_flip_concentrates_on_input() {
        let mech = RandomizedResponseEdges::new(3, 1e-9).unwrap();
        let g = Graph::from_edges(3, &[EdgeIndex::new(1, 2).unwrap()]).unwrap();
        assert!(mech.pmf_at(&g, &g).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn rr_single_pair_law() {
        let mech = RandomizedResponseEdges::new(2, 0.25).unwrap();
        let empty = Graph::empty(2).unwrap();
        let full = Graph::complete(2).unwrap();
        assert!((mech.pmf_at(&empty, &empty).unwrap() - 0.75).abs() < 1e-15);
        assert!((mech.pmf_at(&empty, &full).unwrap() - 0.25).abs() < 1e-15);
        let pmf = mech.output_pmf(&full);
        assert!((pmf[0] - 0.25).abs() < 1e-15);
        assert!((pmf[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rr_neighbor_ratios_respect_the_nominal_level() {
        let mech = RandomizedResponseEdges::new(3, 0.2).unwrap();
        let eps = mech.nominal_epsilon().unwrap();
        let bound = eps.exp();
        for g in enumerate_graphs(3).unwrap() {
            let pg = mech.output_pmf(&g);
            for h in neighbors(&g) {
                let ph = mech.output_pmf(&h);
                for (a, b) in pg.iter().zip(&ph) {
                    let ratio = a / b;
                    assert!(ratio <= bound * (1.0 + 1e-12) && ratio >= 1.0 / bound * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn rr_from_epsilon_round_trips() {
        for &eps in &[0.1, 0.5, 1.0, 3.0] {
            let mech = RandomizedResponseEdges::from_epsilon(4, eps).unwrap();
            assert!((mech.nominal_epsilon().unwrap() - eps).abs() < 1e-12);
            assert!((mech.flip_prob() - 1.0 / (1.0 + eps.exp())).abs() < 1e-15);
        }
        assert!(RandomizedResponseEdges::from_epsilon(4, 0.0).is_err());
        assert!(RandomizedResponseEdges::from_epsilon(4, f64::INFINITY).is_err());
    }

    #[test]
    fn rr_rejects_degenerate_flip_probabilities() {
        assert!(RandomizedResponseEdges::new(3, 0.0).is_err());
        assert!(RandomizedResponseEdges::new(3, 0.5).is_err());
        assert!(RandomizedResponseEdges::new(3, 0.7).is_err());
        assert!(RandomizedResponseEdges::new(7, 0.3).is_err());
    }

    #[test]
    fn rr_sampled_outputs_match_pmf_chi_square() {
        let mech = RandomizedResponseEdges::new(3, 0.3).unwrap();
        let g = Graph::from_edges(3, &[EdgeIndex::new(1, 3).unwrap()]).unwrap();
        let pmf = mech.output_pmf(&g);
        let mut rng = SeededRng::new(31);
        let trials = 20_000usize;
        let mut counts = vec![0u32; pmf.len()];
        for _ in 0..trials {
            counts[sample_output(&mech, &g, &mut rng)] += 1;
        }
        let chi2: f64 = pmf
            .iter()
            .zip(&counts)
            .map(|(&p, &c)| {
                let expected = p * trials as f64;
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 0.999 quantile of chi-square with 7 degrees of freedom.
        assert!(chi2 < 24.322, "chi2 = {chi2}");
    }

    #[test]
    fn constant_mechanism_ignores_input() {
        let mech = ConstantMechanism::new(3, vec![0.25, 0.25, 0.5]).unwrap();
        let a = mech.output_pmf(&Graph::empty(3).unwrap());
        let b = mech.output_pmf(&Graph::complete(3).unwrap());
        assert_eq!(a, b);
        assert_eq!(mech.alphabet_len(), 3);
        assert!(ConstantMechanism::new(3, vec![0.5, 0.6]).is_err());
        assert!(ConstantMechanism::new(3, vec![]).is_err());
        assert!(ConstantMechanism::new(3, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn identity_mechanism_is_a_point_mass() {
        let mech = IdentityMechanism::new(3).unwrap();
        for g in enumerate_graphs(3).unwrap() {
            let pmf = mech.output_pmf(&g);
            let hits: Vec<usize> =
                pmf.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i).collect();
            assert_eq!(hits, vec![g.mask64() as usize]);
            assert_eq!(pmf[g.mask64() as usize], 1.0);
        }
        assert!(mech.nominal_epsilon().is_none());
    }

    #[test]
    fn laplace_density_shape() {
        let mech = LaplaceEdgeCount::new(2.0).unwrap();
        let g = Graph::complete(3).unwrap();
        // Peak value at the true count is epsilon/2.
        assert!((mech.density(&g, 3.0) - 1.0).abs() < 1e-12);
        // Symmetric around the count.
        assert!((mech.density(&g, 2.0) - mech.density(&g, 4.0)).abs() < 1e-15);
        // Neighbor log-density gaps never exceed epsilon * |count change|.
        for y in -20..=20 {
            let y = y as f64 / 3.0;
            let gap = (mech.log_density_for_count(2, y) - mech.log_density_for_count(3, y)).abs();
            assert!(gap <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn laplace_density_integrates_to_one() {
        let mech = LaplaceEdgeCount::new(0.7).unwrap();
        // Trapezoid rule on a fine grid split exactly at the kink.
        let count = 4usize;
        let b = mech.scale();
        let (lo, hi) = (count as f64 - 60.0 * b, count as f64 + 60.0 * b);
        let steps = 400_000usize;
        let h = (hi - lo) / steps as f64;
        let mut integral = 0.0;
        for k in 0..steps {
            let y0 = lo + k as f64 * h;
            let y1 = y0 + h;
            integral += 0.5 * (mech.density_for_count(count, y0) + mech.density_for_count(count, y1)) * h;
        }
        assert!((integral - 1.0).abs() < 1e-6, "integral = {integral}");
    }

    #[test]
    fn laplace_sample_statistics() {
        let mech = LaplaceEdgeCount::new(0.5).unwrap();
        let g = Graph::empty(4).unwrap();
        let mut rng = SeededRng::new(8);
        let trials = 100_000;
        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        for _ in 0..trials {
            let y = mech.sample(&g, &mut rng);
            sum += y;
            sum_abs += y.abs();
        }
        let mean = sum / trials as f64;
        let mean_abs = sum_abs / trials as f64;
        let b = mech.scale();
        // mean has sd b*sqrt(2/N); |X| has mean b and sd b/sqrt(N).
        assert!(mean.abs() < 4.0 * b * (2.0 / trials as f64).sqrt(), "mean {mean}");
        assert!((mean_abs - b).abs() < 4.0 * b / (trials as f64).sqrt(), "mean_abs {mean_abs}");
    }

    #[test]
    fn laplace_near_infinite_epsilon_reveals_the_count() {
        let mech = LaplaceEdgeCount::new(1e6).unwrap();
        let g = Graph::complete(4).unwrap();
        let mut rng = SeededRng::new(12);
        for _ in 0..1000 {
            assert!((mech.sample(&g, &mut rng) - 6.0).abs() < 1e-4);
        }
    }

    #[test]
    fn noisy_density_lands_in_unit_interval_for_extreme_graphs() {
        let mech = LaplaceEdgeCount::new(1e6).unwrap();
        let mut rng = SeededRng::new(3);
        let full = Graph::complete(5).unwrap();
        let d = mech.noisy_density(&full, &mut rng).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
        let empty = Graph::empty(5).unwrap();
        let d0 = mech.noisy_density(&empty, &mut rng).unwrap();
        assert!(d0.abs() < 1e-6);
        assert!(mech.noisy_density(&Graph::empty(1).unwrap(), &mut rng).is_err());
    }

    #[test]
    fn laplace_rejects_bad_epsilon() {
        assert!(LaplaceEdgeCount::new(0.0).is_err());
        assert!(LaplaceEdgeCount::new(-1.0).is_err());
        assert!(LaplaceEdgeCount::new(f64::NAN).is_err());
        assert!(LaplaceEdgeCount::new(f64::INFINITY).is_err());
    }
}
