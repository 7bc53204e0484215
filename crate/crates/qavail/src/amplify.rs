//! Amplitude amplification with a known good probability `a`.
//!
//! Each application of `Q` rotates the guess state by `2θ` inside the plane
//! spanned by its good and bad components, where `θ = arcsin(√a)`. After `m`
//! steps the good probability is `sin²((2m+1)θ)`. The schedule stops at
//! `m = ⌊π/(4θ)⌋`, which leaves the good probability at or above `max(a, 1-a)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statevec::{
    good_probability, measure, prepare, AmplificationOperator, GuessPrep, Oracle, StateVector,
};

/// Values of `π/(4θ)` closer than this to an integer are snapped to it before flooring.
const FLOOR_SNAP: f64 = 1e-9;

/// Slack allowed when `a` is computed from a state and lands a hair above one.
const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationSchedule {
    /// Initial good probability.
    pub a: f64,
    /// `arcsin(√a)` in radians.
    pub theta: f64,
    /// Number of `Q` applications.
    pub iterations: usize,
}

impl AmplificationSchedule {
    /// Closed-form good probability after `m` applications of `Q`.
    pub fn probability_after(&self, m: usize) -> f64 {
        ((2 * m + 1) as f64 * self.theta).sin().powi(2)
    }

    /// Closed-form good probability at the scheduled iteration count.
    pub fn success_probability(&self) -> f64 {
        self.probability_after(self.iterations)
    }
}

/// One execution of prepare / amplify / measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RetrievalRun {
    pub item: usize,
    pub is_good: bool,
    pub iterations_used: usize,
    /// One oracle call per `Q` application.
    pub oracle_calls: usize,
}

pub(crate) fn checked_probability(a: f64) -> Result<f64> {
    if !(0.0..=1.0 + PROBABILITY_SLACK).contains(&a) {
        return Err(Error::InvalidProbability(a));
    }
    Ok(a.min(1.0))
}

/// Iteration schedule for initial good probability `a`.
pub fn schedule(a: f64) -> Result<AmplificationSchedule> {
    let a = checked_probability(a)?;
    if a == 0.0 {
        return Err(Error::NoGoodItems);
    }
    let theta = a.sqrt().asin();
    let ratio = std::f64::consts::PI / (4.0 * theta);
    let nearest = ratio.round();
    let iterations = if (ratio - nearest).abs() < FLOOR_SNAP {
        nearest
    } else {
        ratio.floor()
    } as usize;
    Ok(AmplificationSchedule {
        a,
        theta,
        iterations,
    })
}

/// Exact good probability of `Qᵐ A|0⟩`, computed on the statevector.
pub fn success_probability(prep: &GuessPrep, oracle: &Oracle, m: usize) -> Result<f64> {
    if oracle.good_count() == 0 {
        return Err(Error::NoGoodItems);
    }
    let state = amplified_state(prep, oracle, m)?;
    good_probability(&state, oracle)
}

/// `Qᵐ A|0⟩`.
pub fn amplified_state(prep: &GuessPrep, oracle: &Oracle, m: usize) -> Result<StateVector> {
    let op = AmplificationOperator::new(prep, oracle)?;
    op.apply_power(&op.guess_state(), m)
}

/// Schedule for the guess state of `prep` against `oracle`.
pub fn schedule_for(prep: &GuessPrep, oracle: &Oracle) -> Result<AmplificationSchedule> {
    if oracle.good_count() == 0 {
        return Err(Error::NoGoodItems);
    }
    let a = good_probability(&prepare(prep, oracle.dim())?, oracle)?;
    schedule(a)
}

/// Runs the three-step procedure once: prepare, apply `Q` on schedule, measure.
///
/// A bad outcome is reported as such; there is no retry.
pub fn retrieve(prep: &GuessPrep, oracle: &Oracle, seed: u64) -> Result<RetrievalRun> {
    let sched = schedule_for(prep, oracle)?;
    let state = amplified_state(prep, oracle, sched.iterations)?;
    let item = measure(&state, seed, 1)?[0];
    Ok(RetrievalRun {
        item,
        is_good: oracle.is_good(item),
        iterations_used: sched.iterations,
        oracle_calls: sched.iterations,
    })
}

/// Retrieval time in discrete steps: scheduled `Q` applications plus one measurement.
///
/// Grows like `(π/4)/√a` for small `a`.
pub fn availability_by_speed(a: f64) -> Result<u64> {
    let a = checked_probability(a)?;
    if a == 0.0 {
        return Err(Error::InfiniteRetrievalTime);
    }
    Ok(schedule(a)?.iterations as u64 + 1)
}

/// Complete retrievals that fit in `budget` time units.
pub fn availability_by_number(a: f64, budget: u64) -> Result<u64> {
    let a = checked_probability(a)?;
    if a == 0.0 {
        return Ok(0);
    }
    Ok(budget / availability_by_speed(a)?)
}
