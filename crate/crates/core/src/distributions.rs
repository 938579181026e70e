//! Probability distributions over graph spaces.
//!
//! [`ExactDistribution`] is a dense table over all 2^C(n,2) graphs, stored
//! as log-probabilities so that near-degenerate models (a two-queens model
//! with `a` close to 1, an ERGM with large coefficients) neither underflow
//! nor overflow. Structural zeros are `-inf` entries; every normalization
//! and conditioning step goes through log-sum-exp.
//!
//! The generative models ([`IndependentEdgeModel`], [`TwoQueensModel`]) can
//! both be sampled at any `n` and expanded into exact tables when `n` is
//! under the enumeration cap. Sampling consumes one RNG draw per pair slot,
//! in slot order, so sampled graphs are reproducible bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graphs::{
    edge_slots, mask_from_lex_rank, EdgeIndex, Graph, DEFAULT_ENUMERATION_CAP, MAX_TABLE_VERTICES,
};
use crate::math;
use crate::rng::SeededRng;

/// A distribution over graphs on a fixed vertex count that can be sampled.
pub trait GraphSampler {
    fn vertex_count(&self) -> u32;
    fn sample(&self, rng: &mut SeededRng) -> Graph;
}

fn table_len(n: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
    }
    if n > MAX_TABLE_VERTICES {
        return Err(Error::EnumerationCapExceeded { n, cap: MAX_TABLE_VERTICES });
    }
    Ok(1usize << edge_slots(n))
}

/// Dense probability table over every graph on `n` vertices.
///
/// Entries are log-probabilities indexed by the graph's bit mask; the table
/// is always normalized (log-sum-exp of all entries is 0 up to rounding).
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    n: u32,
    log_probs: Vec<f64>,
}

impl ExactDistribution {
    /// Normalize arbitrary log-weights into a distribution. Weights may be
    /// `-inf` (excluded graphs) but not `+inf` or NaN, and at least one must
    /// be finite.
    pub fn from_log_weights(n: u32, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() != table_len(n)? {
            return Err(Error::InvalidDistribution { what: "table length must be 2^C(n,2)" });
        }
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::InvalidDistribution { what: "log-weight is NaN or +inf" });
        }
        let total = math::log_sum_exp(&log_weights);
        if total == f64::NEG_INFINITY {
            return Err(Error::InvalidDistribution { what: "all weights are zero" });
        }
        let log_probs = log_weights.iter().map(|w| w - total).collect();
        Ok(ExactDistribution { n, log_probs })
    }

    /// Normalize nonnegative weights in linear space.
    pub fn from_weights(n: u32, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution { what: "weight is negative or non-finite" });
        }
        let logs = weights.iter().map(|&w| math::ln(w)).collect();
        Self::from_log_weights(n, logs)
    }

    /// Normalize weights given per graph; graphs not listed get weight 0.
    /// Each graph may appear at most once.
    pub fn from_graph_weights(n: u32, entries: &[(Graph, f64)]) -> Result<Self> {
        let mut weights = vec![0.0; table_len(n)?];
        let mut seen = vec![false; weights.len()];
        for (g, w) in entries {
            if g.n() != n {
                return Err(Error::VertexCountMismatch { left: n, right: g.n() });
            }
            let idx = g.mask64() as usize;
            if seen[idx] {
                return Err(Error::InvalidDistribution { what: "graph listed twice" });
            }
            seen[idx] = true;
            weights[idx] = *w;
        }
        Self::from_weights(n, &weights)
    }

    /// All mass on one graph.
    pub fn point_mass(g: &Graph) -> Result<Self> {
        let mut logs = vec![f64::NEG_INFINITY; table_len(g.n())?];
        logs[g.mask64() as usize] = 0.0;
        Self::from_log_weights(g.n(), logs)
    }

    /// Mass 1/2 on each of two distinct graphs.
    pub fn two_point(g0: &Graph, g1: &Graph) -> Result<Self> {
        if g0.n() != g1.n() {
            return Err(Error::VertexCountMismatch { left: g0.n(), right: g1.n() });
        }
        if g0 == g1 {
            return Err(Error::InvalidDistribution { what: "two-point support must be distinct" });
        }
        let mut logs = vec![f64::NEG_INFINITY; table_len(g0.n())?];
        logs[g0.mask64() as usize] = 0.0;
        logs[g1.mask64() as usize] = 0.0;
        Self::from_log_weights(g0.n(), logs)
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub(crate) fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn log_prob(&self, g: &Graph) -> Result<f64> {
        if g.n() != self.n {
            return Err(Error::VertexCountMismatch { left: self.n, right: g.n() });
        }
        Ok(self.log_probs[g.mask64() as usize])
    }

    pub fn prob(&self, g: &Graph) -> Result<f64> {
        Ok(math::exp(self.log_prob(g)?))
    }

    /// Graphs with their probabilities, in lexicographic graph order.
    pub fn iter_lex(&self) -> impl Iterator<Item = (Graph, f64)> + '_ {
        let m = edge_slots(self.n) as u32;
        (0..self.log_probs.len()).map(move |rank| {
            let mask = mask_from_lex_rank(rank, m);
            (Graph::from_mask64(self.n, mask), math::exp(self.log_probs[mask as usize]))
        })
    }

    /// Log-masses of the two halves of the space split by edge `e`:
    /// (mass with `e` present, mass with `e` absent).
    fn secret_log_masses(&self, e: EdgeIndex) -> Result<(f64, f64)> {
        let slot = e.slot(self.n)?;
        let bit = 1u64 << slot;
        let mut with: Vec<f64> = Vec::with_capacity(self.log_probs.len() / 2);
        let mut without: Vec<f64> = Vec::with_capacity(self.log_probs.len() / 2);
        for (mask, &lp) in self.log_probs.iter().enumerate() {
            if mask as u64 & bit != 0 {
                with.push(lp);
            } else {
                without.push(lp);
            }
        }
        Ok((math::log_sum_exp(&with), math::log_sum_exp(&without)))
    }

    /// Pr(edge `e` present).
    pub fn edge_marginal(&self, e: EdgeIndex) -> Result<f64> {
        let (lin, lout) = self.secret_log_masses(e)?;
        if lout == f64::NEG_INFINITY {
            return Ok(1.0);
        }
        // exp(lin) / (exp(lin) + exp(lout)), computed stably.
        Ok(math::logistic(lin - lout))
    }

    /// ln Pr(e present) - ln Pr(e absent). Infinite when either side
    /// carries no mass.
    pub fn edge_log_odds(&self, e: EdgeIndex) -> Result<f64> {
        let (lin, lout) = self.secret_log_masses(e)?;
        Ok(lin - lout)
    }

    /// Both edge states must have positive probability for an edge secret
    /// to be testable; reports which states are empty otherwise.
    pub fn secret_is_degenerate(&self, e: EdgeIndex) -> Result<bool> {
        let (lin, lout) = self.secret_log_masses(e)?;
        Ok(lin == f64::NEG_INFINITY || lout == f64::NEG_INFINITY)
    }

    /// Condition on an arbitrary event given as a predicate over graphs.
    pub fn condition_on(&self, keep: impl Fn(&Graph) -> bool) -> Result<Self> {
        let mut logs = self.log_probs.clone();
        for (mask, lp) in logs.iter_mut().enumerate() {
            if !keep(&Graph::from_mask64(self.n, mask as u64)) {
                *lp = f64::NEG_INFINITY;
            }
        }
        let total = math::log_sum_exp(&logs);
        if total == f64::NEG_INFINITY {
            return Err(Error::ZeroProbabilityEvent);
        }
        for lp in &mut logs {
            *lp -= total;
        }
        Ok(ExactDistribution { n: self.n, log_probs: logs })
    }

    /// Condition on edge `e` being present (`true`) or absent (`false`).
    ///
    /// Fails with [`Error::DegenerateSecret`] when the requested state
    /// carries no mass, so callers can skip the secret rather than divide
    /// by zero.
    pub fn condition_on_secret(&self, e: EdgeIndex, present: bool) -> Result<Self> {
        let slot = e.slot(self.n)?;
        let bit = 1u64 << slot;
        let mut logs = self.log_probs.clone();
        for (mask, lp) in logs.iter_mut().enumerate() {
            if (mask as u64 & bit != 0) != present {
                *lp = f64::NEG_INFINITY;
            }
        }
        let total = math::log_sum_exp(&logs);
        if total == f64::NEG_INFINITY {
            return Err(Error::DegenerateSecret { edge: e });
        }
        for lp in &mut logs {
            *lp -= total;
        }
        Ok(ExactDistribution { n: self.n, log_probs: logs })
    }

    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::VertexCountMismatch { left: self.n, right: other.n });
        }
        let sum: f64 = self
            .log_probs
            .iter()
            .zip(&other.log_probs)
            .map(|(&a, &b)| math::abs(math::exp(a) - math::exp(b)))
            .sum();
        Ok(0.5 * sum)
    }

    /// Probability of each edge count 0..=C(n,2); the image of the table
    /// under |E|. Count-valued mechanisms only depend on this.
    pub fn edge_count_pmf(&self) -> Vec<f64> {
        let mut pmf = vec![0.0; edge_slots(self.n) + 1];
        for (mask, &lp) in self.log_probs.iter().enumerate() {
            pmf[(mask as u64).count_ones() as usize] += math::exp(lp);
        }
        pmf
    }
}

impl GraphSampler for ExactDistribution {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    /// Inverse-CDF draw in lexicographic graph order; one RNG step.
    fn sample(&self, rng: &mut SeededRng) -> Graph {
        let u = rng.next_f64();
        let m = edge_slots(self.n) as u32;
        let mut acc = 0.0;
        let mut last_positive = 0u64;
        for rank in 0..self.log_probs.len() {
            let mask = mask_from_lex_rank(rank, m);
            let p = math::exp(self.log_probs[mask as usize]);
            if p > 0.0 {
                last_positive = mask;
                acc += p;
                if u < acc {
                    return Graph::from_mask64(self.n, mask);
                }
            }
        }
        // Rounding left acc marginally below 1; clamp to the last atom.
        Graph::from_mask64(self.n, last_positive)
    }
}

/// Product measure over pair slots: each edge present independently with
/// its own probability.
#[derive(Clone, Debug)]
pub struct IndependentEdgeModel {
    n: u32,
    pi: Vec<f64>,
}

fn check_probability(p: f64, what: &'static str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter { what });
    }
    Ok(())
}

impl IndependentEdgeModel {
    /// One probability per pair slot, in slot order.
    pub fn new(n: u32, pi: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
        }
        if pi.len() != edge_slots(n) {
            return Err(Error::InvalidParameter { what: "need one probability per vertex pair" });
        }
        for &p in &pi {
            check_probability(p, "edge probability must lie in [0, 1]")?;
        }
        Ok(IndependentEdgeModel { n, pi })
    }

    /// Every edge present independently with the same probability.
    pub fn uniform(n: u32, p: f64) -> Result<Self> {
        check_probability(p, "edge probability must lie in [0, 1]")?;
        Self::new(n, vec![p; edge_slots(n)])
    }

    /// The witness measure for a neighbor pair: edge `e` is a fair coin,
    /// every other pair is frozen to its state in `g`. The support is
    /// exactly {g with e absent, g with e present}.
    pub fn neighbor_pair(g: &Graph, e: EdgeIndex) -> Result<Self> {
        let slot = e.slot(g.n())?;
        let pi = (0..edge_slots(g.n()))
            .map(|s| if s == slot { 0.5 } else if g.bit(s) { 1.0 } else { 0.0 })
            .collect();
        Self::new(g.n(), pi)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_prob(&self, e: EdgeIndex) -> Result<f64> {
        Ok(self.pi[e.slot(self.n)?])
    }

    pub fn set_edge_prob(&mut self, e: EdgeIndex, p: f64) -> Result<()> {
        check_probability(p, "edge probability must lie in [0, 1]")?;
        let slot = e.slot(self.n)?;
        self.pi[slot] = p;
        Ok(())
    }

    pub fn exact_distribution(&self) -> Result<ExactDistribution> {
        self.exact_distribution_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn exact_distribution_with_cap(&self, cap: u32) -> Result<ExactDistribution> {
        // Reuse the enumeration guard for a consistent error.
        crate::graphs::enumerate_graphs_with_cap(self.n, cap)?;
        let m = edge_slots(self.n);
        let lp1: Vec<f64> = self.pi.iter().map(|&p| math::ln(p)).collect();
        let lp0: Vec<f64> = self.pi.iter().map(|&p| math::ln_1p(-p)).collect();
        let mut logs = vec![0.0; 1usize << m];
        for (mask, lw) in logs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for slot in 0..m {
                acc += if mask >> slot & 1 == 1 { lp1[slot] } else { lp0[slot] };
            }
            *lw = acc;
        }
        ExactDistribution::from_log_weights(self.n, logs)
    }
}

impl GraphSampler for IndependentEdgeModel {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn sample(&self, rng: &mut SeededRng) -> Graph {
        let mut g = Graph::empty(self.n).expect("n >= 1");
        for (slot, e) in crate::graphs::all_edges(self.n).enumerate() {
            if rng.bernoulli(self.pi[slot]) {
                g = g.with_edge(e, true).expect("edge valid");
            }
        }
        g
    }
}

/// Hive model with two distinguished "queen" vertices 1 and 2.
///
/// The queens' own edge is present with prior probability `q`. Every other
/// pair is present with probability `a` when the queens are linked and `b`
/// otherwise, independently. Since `b < a`, overall edge density leaks the
/// queens' secret; how much is exactly what the attack experiments measure.
#[derive(Clone, Copy, Debug)]
pub struct TwoQueensModel {
    n: u32,
    a: f64,
    b: f64,
    q: f64,
}

impl TwoQueensModel {
    /// Requires `n >= 3`, `0 <= b < a <= 1`, and `q` strictly inside (0,1).
    pub fn new(n: u32, a: f64, b: f64, q: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter { what: "two-queens model needs n >= 3" });
        }
        check_probability(a, "linked density a must lie in [0, 1]")?;
        check_probability(b, "unlinked density b must lie in [0, 1]")?;
        if b >= a {
            return Err(Error::InvalidParameter { what: "need b < a" });
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter { what: "queens prior q must lie strictly in (0, 1)" });
        }
        Ok(TwoQueensModel { n, a, b, q })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The secret edge {1, 2}; always slot 0.
    pub fn queens_edge(&self) -> EdgeIndex {
        EdgeIndex::new(1, 2).expect("1 < 2")
    }

    pub fn exact_distribution(&self) -> Result<ExactDistribution> {
        self.exact_distribution_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn exact_distribution_with_cap(&self, cap: u32) -> Result<ExactDistribution> {
        crate::graphs::enumerate_graphs_with_cap(self.n, cap)?;
        let m = edge_slots(self.n);
        let mut logs = vec![0.0; 1usize << m];
        let (la1, la0) = (math::ln(self.a), math::ln_1p(-self.a));
        let (lb1, lb0) = (math::ln(self.b), math::ln_1p(-self.b));
        let (lq1, lq0) = (math::ln(self.q), math::ln_1p(-self.q));
        for (mask, lw) in logs.iter_mut().enumerate() {
            let linked = mask & 1 == 1;
            let mut acc = if linked { lq1 } else { lq0 };
            let (l1, l0) = if linked { (la1, la0) } else { (lb1, lb0) };
            for slot in 1..m {
                acc += if mask >> slot & 1 == 1 { l1 } else { l0 };
            }
            *lw = acc;
        }
        ExactDistribution::from_log_weights(self.n, logs)
    }
}

impl GraphSampler for TwoQueensModel {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn sample(&self, rng: &mut SeededRng) -> Graph {
        let mut g = Graph::empty(self.n).expect("n >= 3");
        let linked = rng.bernoulli(self.q);
        let c = if linked { self.a } else { self.b };
        // Slot 0 is the queens edge; remaining slots share density c.
        for (slot, e) in crate::graphs::all_edges(self.n).enumerate() {
            let p = if slot == 0 { if linked { 1.0 } else { 0.0 } } else { c };
            if slot == 0 {
                if linked {
                    g = g.with_edge(e, true).expect("edge valid");
                }
            } else if rng.bernoulli(p) {
                g = g.with_edge(e, true).expect("edge valid");
            }
        }
        g
    }
}
