//! Exponential random graph models over edge, two-star, and triangle
//! counts.
//!
//! A model weights each graph by exp(beta . u(g)) with u the vector of
//! selected statistics. Everything an auditor needs reduces to two
//! quantities:
//!
//! * the change score beta . (u(g with e) - u(g without e)), which is the
//!   conditional log-odds of edge e given the rest of g (the full-
//!   conditional used by the Gibbs sweep);
//! * the marginal log-odds of e, from the exact table.
//!
//! The gap between those two, maximized over graphs, edges, and a model
//! family, is the slack [`compute_alpha`] reports: it bounds how far the
//! model is from an independent-edge model in exactly the sense the
//! conditional-ratio certificate ([`crate::audit::verify_lemma6_condition`])
//! measures, and it collapses to 0 for edges-only models. The coarse bound
//! 2 * zeta (twice the largest absolute change score) comes along for free.

use alloc::vec;
use alloc::vec::Vec;

use crate::audit::Leakage;
use crate::distributions::ExactDistribution;
use crate::error::{Error, Result};
use crate::graphs::{
    all_edges, enumerate_graphs_with_cap, EdgeIndex, Graph, DEFAULT_ENUMERATION_CAP,
    MAX_TABLE_VERTICES,
};
use crate::math;
use crate::rng::{derive_seed, SeededRng};

/// Sweeps discarded before a Gibbs chain is considered mixed, unless the
/// caller picks otherwise.
pub const DEFAULT_GIBBS_BURN_IN: usize = 100;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StatisticKind {
    EdgeCount,
    TwoStarCount,
    TriangleCount,
}

impl StatisticKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::EdgeCount => "edges",
            StatisticKind::TwoStarCount => "two_stars",
            StatisticKind::TriangleCount => "triangles",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "edges" => Some(StatisticKind::EdgeCount),
            "two_stars" => Some(StatisticKind::TwoStarCount),
            "triangles" => Some(StatisticKind::TriangleCount),
            _ => None,
        }
    }
}

/// Adjacency bitsets plus degrees; the incremental state behind both the
/// statistics and the Gibbs sweep. Vertices are 0-based internally.
struct AdjacencyState {
    n: usize,
    blocks: usize,
    rows: Vec<u64>,
    deg: Vec<u32>,
}

impl AdjacencyState {
    fn empty(n: usize) -> Self {
        let blocks = n.div_ceil(64).max(1);
        AdjacencyState { n, blocks, rows: vec![0; n * blocks], deg: vec![0; n] }
    }

    fn from_graph(g: &Graph) -> Self {
        let mut s = Self::empty(g.n() as usize);
        for e in g.edges() {
            s.set(e.i() as usize - 1, e.j() as usize - 1, true);
        }
        s
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.blocks + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, present: bool) {
        if self.has(i, j) == present {
            return;
        }
        let (bi, bj) = (i * self.blocks + j / 64, j * self.blocks + i / 64);
        self.rows[bi] ^= 1 << (j % 64);
        self.rows[bj] ^= 1 << (i % 64);
        if present {
            self.deg[i] += 1;
            self.deg[j] += 1;
        } else {
            self.deg[i] -= 1;
            self.deg[j] -= 1;
        }
    }

    /// |N(i) & N(j)|; i and j never count themselves (no self-loops).
    fn common_neighbors(&self, i: usize, j: usize) -> u32 {
        (0..self.blocks)
            .map(|b| (self.rows[i * self.blocks + b] & self.rows[j * self.blocks + b]).count_ones())
            .sum()
    }

    fn edge_count(&self) -> u64 {
        self.deg.iter().map(|&d| d as u64).sum::<u64>() / 2
    }

    fn two_star_count(&self) -> u64 {
        self.deg.iter().map(|&d| d as u64 * (d as u64).saturating_sub(1) / 2).sum()
    }

    fn triangle_count(&self) -> u64 {
        let mut tri3 = 0u64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has(i, j) {
                    tri3 += self.common_neighbors(i, j) as u64;
                }
            }
        }
        // Each triangle is seen once per edge.
        tri3 / 3
    }

    fn to_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has(i, j) {
                    edges.push(EdgeIndex::new(i as u32 + 1, j as u32 + 1).expect("i < j"));
                }
            }
        }
        Graph::from_edges(self.n as u32, &edges).expect("valid edges")
    }
}

#[derive(Clone, Debug)]
pub struct ErgmModel {
    n: u32,
    statistics: Vec<StatisticKind>,
    beta: Vec<f64>,
}

impl ErgmModel {
    /// One coefficient per statistic; statistics must be distinct and
    /// coefficients finite. An empty statistics list is the uniform model.
    pub fn new(n: u32, statistics: Vec<StatisticKind>, beta: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
        }
        if statistics.len() != beta.len() {
            return Err(Error::InvalidParameter { what: "one coefficient per statistic" });
        }
        for (k, s) in statistics.iter().enumerate() {
            if statistics[..k].contains(s) {
                return Err(Error::InvalidParameter { what: "statistics must be distinct" });
            }
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter { what: "coefficients must be finite" });
        }
        Ok(ErgmModel { n, statistics, beta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn statistics(&self) -> &[StatisticKind] {
        &self.statistics
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// The selected statistics of `g`, in model order.
    pub fn statistics_vector(&self, g: &Graph) -> Result<Vec<f64>> {
        if g.n() != self.n {
            return Err(Error::VertexCountMismatch { left: self.n, right: g.n() });
        }
        let state = AdjacencyState::from_graph(g);
        Ok(self
            .statistics
            .iter()
            .map(|s| match s {
                StatisticKind::EdgeCount => state.edge_count() as f64,
                StatisticKind::TwoStarCount => state.two_star_count() as f64,
                StatisticKind::TriangleCount => state.triangle_count() as f64,
            })
            .collect())
    }

    /// Unnormalized log-weight beta . u(g).
    pub fn log_weight(&self, g: &Graph) -> Result<f64> {
        let u = self.statistics_vector(g)?;
        Ok(dot(&self.beta, &u))
    }

    fn change_on_state(&self, state: &AdjacencyState, i: usize, j: usize) -> Vec<f64> {
        let has = state.has(i, j) as u32;
        self.statistics
            .iter()
            .map(|s| match s {
                StatisticKind::EdgeCount => 1.0,
                // Degrees with e itself excluded.
                StatisticKind::TwoStarCount => {
                    ((state.deg[i] - has) + (state.deg[j] - has)) as f64
                }
                StatisticKind::TriangleCount => state.common_neighbors(i, j) as f64,
            })
            .collect()
    }

    /// beta . change, without materializing the change vector; this is the
    /// Gibbs inner loop.
    fn change_score_on_state(&self, state: &AdjacencyState, i: usize, j: usize) -> f64 {
        let has = state.has(i, j) as u32;
        let mut score = 0.0;
        for (s, &coef) in self.statistics.iter().zip(&self.beta) {
            score += coef
                * match s {
                    StatisticKind::EdgeCount => 1.0,
                    StatisticKind::TwoStarCount => {
                        ((state.deg[i] - has) + (state.deg[j] - has)) as f64
                    }
                    StatisticKind::TriangleCount => state.common_neighbors(i, j) as f64,
                };
        }
        score
    }

    /// u(g with e) - u(g without e); independent of e's state in `g`.
    pub fn change_statistic(&self, g: &Graph, e: EdgeIndex) -> Result<Vec<f64>> {
        if g.n() != self.n {
            return Err(Error::VertexCountMismatch { left: self.n, right: g.n() });
        }
        e.slot(self.n)?;
        let state = AdjacencyState::from_graph(g);
        Ok(self.change_on_state(&state, e.i() as usize - 1, e.j() as usize - 1))
    }

    /// beta . change_statistic: the conditional log-odds of edge `e` given
    /// the rest of `g`.
    pub fn change_score(&self, g: &Graph, e: EdgeIndex) -> Result<f64> {
        Ok(dot(&self.beta, &self.change_statistic(g, e)?))
    }

    /// Pr(e present | rest of g) = logistic(change score).
    pub fn conditional_edge_probability(&self, g: &Graph, e: EdgeIndex) -> Result<f64> {
        Ok(math::logistic(self.change_score(g, e)?))
    }

    pub fn exact_distribution(&self) -> Result<ExactDistribution> {
        self.exact_distribution_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn exact_distribution_with_cap(&self, cap: u32) -> Result<ExactDistribution> {
        let graphs = enumerate_graphs_with_cap(self.n, cap)?;
        let mut logs = vec![0.0; graphs.len()];
        for g in graphs {
            logs[g.mask64() as usize] = self.log_weight(&g)?;
        }
        ExactDistribution::from_log_weights(self.n, logs)
    }

    /// ln Pr(e present) - ln Pr(e absent) under the exact model.
    pub fn marginal_edge_log_odds(&self, e: EdgeIndex) -> Result<f64> {
        self.marginal_edge_log_odds_with_cap(e, DEFAULT_ENUMERATION_CAP)
    }

    pub fn marginal_edge_log_odds_with_cap(&self, e: EdgeIndex, cap: u32) -> Result<f64> {
        self.exact_distribution_with_cap(cap)?.edge_log_odds(e)
    }

    /// One Gibbs chain: start from an rng-chosen uniform graph, sweep the
    /// pair slots in lexicographic order `sweeps` times, resampling each
    /// edge from its full conditional, and return the final state.
    ///
    /// Works at any `n`; mixing time is the caller's problem (see
    /// [`DEFAULT_GIBBS_BURN_IN`]).
    pub fn gibbs_sample(&self, sweeps: usize, rng: &mut SeededRng) -> Graph {
        let n = self.n as usize;
        let mut state = AdjacencyState::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                state.set(i, j, rng.bernoulli(0.5));
            }
        }
        for _ in 0..sweeps {
            self.gibbs_sweep(&mut state, rng);
        }
        state.to_graph()
    }

    fn gibbs_sweep(&self, state: &mut AdjacencyState, rng: &mut SeededRng) {
        let n = self.n as usize;
        for i in 0..n {
            for j in i + 1..n {
                let score = self.change_score_on_state(state, i, j);
                state.set(i, j, rng.bernoulli(math::logistic(score)));
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pooled post-burn-in state counts from many independent Gibbs chains.
///
/// Runs `chains` chains for `sweeps` sweeps each, with chain `c` seeded as
/// stream `c` of `root_seed`; after each sweep past `burn_in` the current
/// state's table index is tallied. The result has 2^C(n,2) entries summing
/// to `chains * (sweeps - burn_in)` and is directly comparable to an exact
/// table.
pub fn gibbs_state_histogram(
    model: &ErgmModel,
    chains: usize,
    sweeps: usize,
    burn_in: usize,
    root_seed: u64,
) -> Result<Vec<u64>> {
    if burn_in >= sweeps {
        return Err(Error::InvalidParameter { what: "need burn_in < sweeps" });
    }
    if chains == 0 {
        return Err(Error::InvalidParameter { what: "need at least one chain" });
    }
    // The histogram is a full table over graphs, so the table ceiling
    // applies even though the sweeps themselves would scale further.
    let table_len = enumerate_graphs_with_cap(model.n, MAX_TABLE_VERTICES)?.len();
    let mut counts = vec![0u64; table_len];
    let n = model.n as usize;
    for chain in 0..chains {
        let mut rng = SeededRng::new(derive_seed(root_seed, chain as u64));
        let mut state = AdjacencyState::empty(n);
        let mut mask = 0usize;
        let mut slot = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if rng.bernoulli(0.5) {
                    state.set(i, j, true);
                    mask |= 1 << slot;
                }
                slot += 1;
            }
        }
        for sweep in 0..sweeps {
            let mut slot = 0usize;
            for i in 0..n {
                for j in i + 1..n {
                    let score = model.change_score_on_state(&state, i, j);
                    let present = rng.bernoulli(math::logistic(score));
                    state.set(i, j, present);
                    if present {
                        mask |= 1 << slot;
                    } else {
                        mask &= !(1 << slot);
                    }
                    slot += 1;
                }
            }
            if sweep >= burn_in {
                counts[mask] += 1;
            }
        }
    }
    Ok(counts)
}

/// Witness location for an extreme score or slack value.
#[derive(Clone, Debug)]
pub struct AlphaWitness {
    pub model_index: usize,
    pub graph: Graph,
    pub edge: EdgeIndex,
}

#[derive(Clone, Debug)]
pub struct AlphaResult {
    /// sup |change score - marginal log-odds| over the family.
    pub alpha_exact: Leakage,
    /// sup |change score| over the family.
    pub zeta: f64,
    /// The closed-form bound 2 * zeta; alpha_exact never exceeds it.
    pub alpha_upper: f64,
    pub witness_alpha: Option<AlphaWitness>,
    pub witness_zeta: Option<AlphaWitness>,
}

/// Exact conditional-odds slack of a finite ERGM family.
///
/// For every model, edge e, and graph g without e, compares the conditional
/// log-odds of e given the rest of g against its marginal log-odds (the
/// witness graph is reported with e absent; adding e changes neither
/// quantity). The maximum gap is `alpha_exact`; for families whose only
/// statistic is the edge count the conditionals equal the marginals and the
/// slack is 0.
pub fn compute_alpha(family: &[ErgmModel]) -> Result<AlphaResult> {
    compute_alpha_with_cap(family, DEFAULT_ENUMERATION_CAP)
}

pub fn compute_alpha_with_cap(family: &[ErgmModel], cap: u32) -> Result<AlphaResult> {
    if family.is_empty() {
        return Err(Error::InvalidParameter { what: "model family must be nonempty" });
    }
    let mut alpha = -1.0f64;
    let mut zeta = 0.0f64;
    let mut witness_alpha = None;
    let mut witness_zeta = None;
    for (t, model) in family.iter().enumerate() {
        let table = model.exact_distribution_with_cap(cap)?;
        for e in all_edges(model.n) {
            let mlo = table.edge_log_odds(e)?;
            let slot = e.slot(model.n)?;
            for g in enumerate_graphs_with_cap(model.n, cap)? {
                if g.bit(slot) {
                    continue;
                }
                let score = model.change_score(&g, e)?;
                if math::abs(score) > zeta {
                    zeta = math::abs(score);
                    witness_zeta =
                        Some(AlphaWitness { model_index: t, graph: g.clone(), edge: e });
                }
                if !mlo.is_finite() {
                    return Ok(AlphaResult {
                        alpha_exact: Leakage::Unbounded,
                        zeta,
                        alpha_upper: f64::INFINITY,
                        witness_alpha: Some(AlphaWitness { model_index: t, graph: g, edge: e }),
                        witness_zeta,
                    });
                }
                let gap = math::abs(score - mlo);
                if gap > alpha {
                    alpha = gap;
                    witness_alpha =
                        Some(AlphaWitness { model_index: t, graph: g.clone(), edge: e });
                }
            }
        }
    }
    Ok(AlphaResult {
        alpha_exact: Leakage::Finite(alpha.max(0.0)),
        zeta,
        alpha_upper: 2.0 * zeta,
        witness_alpha,
        witness_zeta,
    })
}
