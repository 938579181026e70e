//! Edge re-identification attack against noisy edge-density release.
//!
//! The setting: graphs come from a [`TwoQueensModel`], where one marked
//! pair's edge is the secret and every other pair is dense (`a`) or sparse
//! (`b`) depending on that secret. The release is the Laplace-noised edge
//! density. The attacker thresholds the release at (a + b) / 2 and guesses
//! the secret edge is present above the threshold.
//!
//! The point of the experiment is the scaling: the density concentrates as
//! the graph grows, so with the noise scale fixed the attack's accuracy
//! climbs toward 1 even though the per-query privacy guarantee is
//! unchanged. [`accuracy_vs_n_sweep`] produces that curve.
//!
//! Trials are indexed: trial `t` of root seed `s` always draws from
//! `derive_seed(s, t)`, so a parallel driver that evaluates trials in any
//! order gets bitwise the same outcomes as the serial loop here.

use alloc::vec::Vec;

use crate::distributions::{GraphSampler, TwoQueensModel};
use crate::error::{Error, Result};
use crate::mechanisms::LaplaceEdgeCount;
use crate::rng::{derive_seed, SeededRng};

/// One sampled graph, one noisy release, one guess.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TrialOutcome {
    /// Whether the secret edge was actually present.
    pub truth: bool,
    /// The attacker's call.
    pub guess: bool,
    /// The released noisy edge density.
    pub noisy_density: f64,
}

/// Aggregate of a fixed-seed trial batch, carrying enough context to be
/// reported as one row of a sweep.
#[derive(Clone, PartialEq, Debug)]
pub struct AttackResult {
    pub n: u32,
    pub trials: u64,
    /// Fraction of trials where the guess matched the truth.
    pub accuracy: f64,
    /// Mean released density over trials with the secret edge present;
    /// absent when no trial had it.
    pub mean_noisy_density_truth1: Option<f64>,
    pub mean_noisy_density_truth0: Option<f64>,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub seed: u64,
}

/// The attacker's decision threshold on the released density.
pub fn decision_threshold(model: &TwoQueensModel) -> f64 {
    (model.a() + model.b()) / 2.0
}

/// Run one trial with the given rng: sample a graph, release its noisy
/// density, guess by thresholding.
pub fn queens_attack_trial(
    model: &TwoQueensModel,
    mech: &LaplaceEdgeCount,
    rng: &mut SeededRng,
) -> Result<TrialOutcome> {
    let g = model.sample(rng);
    let truth = g.has_edge(model.queens_edge())?;
    let noisy_density = mech.noisy_density(&g, rng)?;
    Ok(TrialOutcome { truth, guess: noisy_density > decision_threshold(model), noisy_density })
}

/// Trial `trial` of the batch rooted at `root_seed`. Pure in its arguments,
/// which is what makes out-of-order parallel execution exact.
pub fn queens_attack_trial_indexed(
    model: &TwoQueensModel,
    mech: &LaplaceEdgeCount,
    root_seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut rng = SeededRng::new(derive_seed(root_seed, trial));
    queens_attack_trial(model, mech, &mut rng)
}

/// Fold outcomes (in trial order) into an [`AttackResult`] row.
pub fn aggregate_trials(
    model: &TwoQueensModel,
    epsilon: f64,
    seed: u64,
    outcomes: &[TrialOutcome],
) -> Result<AttackResult> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter { what: "need at least one trial" });
    }
    let mut correct = 0u64;
    let (mut sum1, mut count1) = (0.0f64, 0u64);
    let (mut sum0, mut count0) = (0.0f64, 0u64);
    for o in outcomes {
        if o.guess == o.truth {
            correct += 1;
        }
        if o.truth {
            sum1 += o.noisy_density;
            count1 += 1;
        } else {
            sum0 += o.noisy_density;
            count0 += 1;
        }
    }
    Ok(AttackResult {
        n: model.n(),
        trials: outcomes.len() as u64,
        accuracy: correct as f64 / outcomes.len() as f64,
        mean_noisy_density_truth1: (count1 > 0).then(|| sum1 / count1 as f64),
        mean_noisy_density_truth0: (count0 > 0).then(|| sum0 / count0 as f64),
        epsilon,
        a: model.a(),
        b: model.b(),
        q: model.q(),
        seed,
    })
}

/// Serial reference experiment: `trials` indexed trials under one root
/// seed, aggregated.
pub fn queens_attack_experiment(
    model: &TwoQueensModel,
    epsilon: f64,
    trials: u64,
    root_seed: u64,
) -> Result<AttackResult> {
    let mech = LaplaceEdgeCount::new(epsilon)?;
    let mut outcomes = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        outcomes.push(queens_attack_trial_indexed(model, &mech, root_seed, t)?);
    }
    aggregate_trials(model, epsilon, root_seed, &outcomes)
}

/// The accuracy curve over graph sizes, with everything else held fixed.
/// Each row's seed is derived from its `n`, not its position, so editing
/// the size list does not perturb the surviving rows.
pub fn accuracy_vs_n_sweep(
    a: f64,
    b: f64,
    q: f64,
    epsilon: f64,
    n_list: &[u32],
    trials: u64,
    root_seed: u64,
) -> Result<Vec<AttackResult>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let model = TwoQueensModel::new(n, a, b, q)?;
        let row_seed = derive_seed(root_seed, n as u64);
        rows.push(queens_attack_experiment(&model, epsilon, trials, row_seed)?);
    }
    Ok(rows)
}
