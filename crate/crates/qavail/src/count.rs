//! Counting as `N ×` amplitude estimation.
//!
//! With the uniform guess state the estimate tracks the true count `t`. With
//! any other guess state it tracks `aN` instead, so a guess state that favors
//! the good items over-counts them and one that disfavors them under-counts.

use serde::Serialize;

use crate::error::Result;
use crate::estimate::{est_amp, est_amp_distribution, register_estimate, EstimationConfig};
use crate::statevec::{GuessPrep, Oracle};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountEstimate {
    /// `N · a_hat`; never rounded.
    pub t_hat: f64,
    pub a_hat: f64,
    pub t_true: usize,
    /// Whether the guess state was anything other than uniform.
    pub biased: bool,
    pub y: usize,
    pub q_applications: u64,
}

/// One support point of the count distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountBin {
    pub t_hat: f64,
    pub probability: f64,
}

/// Oracle budgets of quantum counting next to exhaustive classical evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CostComparison {
    pub quantum_q_applications: u64,
    /// Evaluations a classical estimator needs to tell `t = 1` from `t = 0`
    /// with constant confidence: `Θ(N)`, reported as `N`.
    pub classical_evaluations: u64,
}

pub fn count(
    prep: &GuessPrep,
    oracle: &Oracle,
    register_dim: usize,
    seed: u64,
) -> Result<CountEstimate> {
    let cfg = EstimationConfig::new(register_dim, prep.clone(), oracle.clone())?;
    count_with_config(&cfg, seed)
}

/// [`count`] for a prebuilt configuration (custom joint cap).
pub fn count_with_config(cfg: &EstimationConfig, seed: u64) -> Result<CountEstimate> {
    let outcome = est_amp(cfg, seed)?;
    Ok(scale_outcome(cfg, outcome.y, outcome.a_hat))
}

pub(crate) fn scale_outcome(cfg: &EstimationConfig, y: usize, a_hat: f64) -> CountEstimate {
    let n = cfg.oracle().dim() as f64;
    CountEstimate {
        t_hat: n * a_hat,
        a_hat,
        t_true: cfg.oracle().good_count(),
        biased: !cfg.prep().is_uniform(),
        y,
        q_applications: cfg.q_applications(),
    }
}

/// Exact distribution of `t_hat`, sorted by value, with `y` and `M - y` merged.
pub fn count_distribution(
    prep: &GuessPrep,
    oracle: &Oracle,
    register_dim: usize,
) -> Result<Vec<CountBin>> {
    let cfg = EstimationConfig::new(register_dim, prep.clone(), oracle.clone())?;
    let distribution = est_amp_distribution(&cfg)?;
    Ok(merge_register_outcomes(&distribution, oracle.dim()))
}

/// Folds a register distribution onto `t_hat` values.
///
/// `sin²(πy/M)` is strictly increasing on `0..=M/2`, so folding `y` onto
/// `min(y, M - y)` both merges equal values and sorts them.
pub fn merge_register_outcomes(distribution: &[f64], n: usize) -> Vec<CountBin> {
    let m = distribution.len();
    let mut folded = vec![0.0; m / 2 + 1];
    for (y, &p) in distribution.iter().enumerate() {
        folded[y.min(m - y)] += p;
    }
    folded
        .into_iter()
        .enumerate()
        .map(|(y, probability)| CountBin {
            t_hat: n as f64 * register_estimate(y, m),
            probability,
        })
        .collect()
}

/// Smallest `t_hat` whose cumulative probability reaches one half.
pub fn median(bins: &[CountBin]) -> f64 {
    let mut cumulative = 0.0;
    for bin in bins {
        cumulative += bin.probability;
        if cumulative >= 0.5 - 1e-12 {
            return bin.t_hat;
        }
    }
    bins.last().map_or(0.0, |b| b.t_hat)
}

/// Most probable `t_hat`; the smaller value wins ties.
pub fn mode(bins: &[CountBin]) -> f64 {
    let mut best: Option<&CountBin> = None;
    for bin in bins {
        if best.is_none_or(|b| bin.probability > b.probability + 1e-12) {
            best = Some(bin);
        }
    }
    best.map_or(0.0, |b| b.t_hat)
}

pub fn cost_comparison(n: usize, register_dim: usize) -> CostComparison {
    let m = register_dim as u64;
    CostComparison {
        quantum_q_applications: m * m.saturating_sub(1) / 2,
        classical_evaluations: n as u64,
    }
}
