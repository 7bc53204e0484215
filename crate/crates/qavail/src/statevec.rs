//! Dense statevector engine.
//!
//! Items are indexed `0..N` directly; `N` does not have to be a power of two.
//! Everything here is a pure function from immutable inputs to a new value.
//! The amplification operator `Q = -A S₀ A⁻¹ S_f` is never materialized as a
//! matrix: with `|s⟩ = A|0⟩` the conjugated zero-reflection is
//! `A S₀ A⁻¹ = I - 2|s⟩⟨s|`, so `Q = (2|s⟩⟨s| - I) S_f` costs `O(N)`.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance used for every norm and unitarity check.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest item dimension accepted when preparing a state.
pub const MAX_DIM: usize = 1 << 20;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A normalized vector of complex amplitudes over `dim` basis items.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amps`, rejecting empty or non-normalized input.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if amps.len() > MAX_DIM {
            return Err(Error::CapExceeded {
                requested: amps.len(),
                cap: MAX_DIM,
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let normalized = (norm_sqr - 1.0).abs() <= NORM_TOLERANCE;
        if !normalized {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Convenience wrapper for real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// The basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Born-rule probabilities `|amps[x]|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        debug_assert!((amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-6);
        Self { amps }
    }
}

/// The boolean partition `f` of items `0..N` into good and bad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    mask: Vec<bool>,
    good_count: usize,
}

impl Oracle {
    pub fn new<I>(dim: usize, good: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut mask = vec![false; dim];
        for index in good {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            mask[index] = true;
        }
        Ok(Self::from_mask(mask))
    }

    /// Builds an oracle from a predicate over item indices.
    pub fn from_fn(dim: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self::from_mask((0..dim).map(f).collect()))
    }

    fn from_mask(mask: Vec<bool>) -> Self {
        let good_count = mask.iter().filter(|&&g| g).count();
        Self { mask, good_count }
    }

    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    /// Number of good items, `t`.
    pub fn good_count(&self) -> usize {
        self.good_count
    }

    /// `f(x)`. Indices past the end are bad.
    pub fn is_good(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn good_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| g.then_some(i))
    }

    pub(crate) fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// The preparation `A`, described by the probability mass it puts on each item.
///
/// Amplitudes are always the real non-negative square roots of the weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GuessPrep {
    /// `F_N|0⟩`: every item gets weight `1/N`.
    UniformFourier,
    /// Arbitrary weights, normalized to sum to one.
    Weighted { weights: Vec<f64> },
}

impl GuessPrep {
    /// Normalizes `weights` to unit mass. Rejects negative, non-finite or all-zero input.
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDimension);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalWeight);
        }
        let mut weights = weights;
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Ok(GuessPrep::Weighted { weights })
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, GuessPrep::UniformFourier)
    }

    /// Per-item weights for dimension `dim`.
    pub fn weights(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            GuessPrep::UniformFourier => {
                if dim == 0 {
                    return Err(Error::EmptyDimension);
                }
                Ok(vec![1.0 / dim as f64; dim])
            }
            GuessPrep::Weighted { weights } => {
                check_dim(dim, weights.len())?;
                Ok(weights.clone())
            }
        }
    }

    /// The dimension this preparation fixes, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            GuessPrep::UniformFourier => None,
            GuessPrep::Weighted { weights } => Some(weights.len()),
        }
    }

    /// Good-subspace mass `a` of `A|0⟩`, computed from the weights.
    pub fn good_mass(&self, oracle: &Oracle) -> Result<f64> {
        let weights = self.weights(oracle.dim())?;
        Ok(oracle
            .good_indices()
            .map(|x| weights[x])
            .sum::<f64>()
            .min(1.0))
    }
}

/// Direction of the Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Kernel `exp(+2πi·x·y/N)/√N`.
    Forward,
    /// Kernel `exp(-2πi·x·y/N)/√N`.
    Inverse,
}

/// `A|0⟩` with amplitudes `√w_x`.
pub fn prepare(prep: &GuessPrep, dim: usize) -> Result<StateVector> {
    if dim > MAX_DIM {
        return Err(Error::CapExceeded {
            requested: dim,
            cap: MAX_DIM,
        });
    }
    let amps = prep
        .weights(dim)?
        .into_iter()
        .map(|w| Complex64::new(w.sqrt(), 0.0))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// `a = ⟨ψ₁|ψ₁⟩`, the probability of measuring a good item.
pub fn good_probability(state: &StateVector, oracle: &Oracle) -> Result<f64> {
    check_dim(oracle.dim(), state.dim())?;
    Ok(good_mass_of(&state.amps, oracle.mask()))
}

/// `S_f`: flips the sign of every good amplitude.
pub fn apply_sf(state: &StateVector, oracle: &Oracle) -> Result<StateVector> {
    check_dim(oracle.dim(), state.dim())?;
    let mut amps = state.amps.clone();
    phase_flip(&mut amps, oracle.mask());
    Ok(StateVector::from_raw(amps))
}

/// One application of `Q = -A S₀ A⁻¹ S_f`.
pub fn apply_q(state: &StateVector, prep: &GuessPrep, oracle: &Oracle) -> Result<StateVector> {
    let op = AmplificationOperator::new(prep, oracle)?;
    op.apply(state)
}

/// Discrete Fourier transform over the item index.
pub fn qft(state: &StateVector, direction: Direction) -> StateVector {
    let mut amps = state.amps.clone();
    let mut planner = FftPlanner::new();
    fourier_in_place(&mut planner, &mut amps, direction);
    StateVector::from_raw(amps)
}

/// Draws `shots` i.i.d. computational-basis outcomes using a ChaCha stream seeded by `seed`.
pub fn measure(state: &StateVector, seed: u64, shots: usize) -> Result<Vec<usize>> {
    sample_indices(&state.probabilities(), seed, shots)
}

/// The amplification operator for a fixed `(A, f)` pair, with `|s⟩ = A|0⟩` cached.
#[derive(Debug, Clone)]
pub struct AmplificationOperator {
    guess: Vec<f64>,
    mask: Vec<bool>,
}

impl AmplificationOperator {
    pub fn new(prep: &GuessPrep, oracle: &Oracle) -> Result<Self> {
        let guess = prepare(prep, oracle.dim())?
            .amps
            .into_iter()
            .map(|a| a.re)
            .collect();
        Ok(Self {
            guess,
            mask: oracle.mask().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.guess.len()
    }

    /// The guess state `|s⟩`.
    pub fn guess_state(&self) -> StateVector {
        StateVector::from_raw(self.guess.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), state.dim())?;
        let mut amps = state.amps.clone();
        self.apply_in_place(&mut amps);
        Ok(StateVector::from_raw(amps))
    }

    /// `Qᵐ|state⟩`.
    pub fn apply_power(&self, state: &StateVector, m: usize) -> Result<StateVector> {
        check_dim(self.dim(), state.dim())?;
        let mut amps = state.amps.clone();
        for _ in 0..m {
            self.apply_in_place(&mut amps);
        }
        Ok(StateVector::from_raw(amps))
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [Complex64]) {
        phase_flip(amps, &self.mask);
        let overlap: Complex64 = self.guess.iter().zip(amps.iter()).map(|(s, a)| a * s).sum();
        let twice = overlap * 2.0;
        for (a, &s) in amps.iter_mut().zip(&self.guess) {
            *a = twice * s - *a;
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn good_mass_of(amps: &[Complex64], mask: &[bool]) -> f64 {
    amps.iter()
        .zip(mask)
        .filter(|(_, &g)| g)
        .map(|(a, _)| a.norm_sqr())
        .sum::<f64>()
        .min(1.0)
}

fn phase_flip(amps: &mut [Complex64], mask: &[bool]) {
    for (a, _) in amps.iter_mut().zip(mask).filter(|(_, &g)| g) {
        *a = -*a;
    }
}

pub(crate) fn fourier_in_place(
    planner: &mut FftPlanner<f64>,
    amps: &mut [Complex64],
    direction: Direction,
) {
    // rustfft's forward transform uses exp(-2πi…), the opposite sign convention.
    let fft_direction = match direction {
        Direction::Forward => FftDirection::Inverse,
        Direction::Inverse => FftDirection::Forward,
    };
    let fft = planner.plan_fft(amps.len(), fft_direction);
    fft.process(amps);
    let scale = 1.0 / (amps.len() as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
}

/// Samples `shots` indices from an (unnormalized is fine) probability vector.
pub(crate) fn sample_indices(probs: &[f64], seed: u64, shots: usize) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let clamped: Vec<f64> = probs.iter().map(|&p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&clamped).map_err(|_| Error::ZeroTotalWeight)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| dist.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    fn re(state: &StateVector) -> Vec<f64> {
        state.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn prepare_uniform_and_point_mass() {
        let s = prepare(&GuessPrep::UniformFourier, 4).unwrap();
        assert!(re(&s).iter().all(|&a| approx(a, 0.5)));

        let s = prepare(&GuessPrep::weighted(vec![1.0, 0.0, 0.0, 0.0]).unwrap(), 4).unwrap();
        assert_eq!(re(&s), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn prepare_weighted_square_roots() {
        let prep = GuessPrep::weighted(vec![0.64, 0.12, 0.12, 0.12]).unwrap();
        let s = prepare(&prep, 4).unwrap();
        let amps = re(&s);
        assert!(approx(amps[0], 0.8));
        for &a in &amps[1..] {
            assert!((a - 0.34641).abs() < 1e-5);
        }
        assert!(approx(s.norm_sqr(), 1.0));
    }

    #[test]
    fn prepare_errors() {
        let prep = GuessPrep::weighted(vec![0.5, 0.5]).unwrap();
        assert_eq!(
            prepare(&prep, 3),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
        assert!(matches!(
            GuessPrep::weighted(vec![0.5, -0.1]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert_eq!(
            GuessPrep::weighted(vec![0.0, 0.0]),
            Err(Error::ZeroTotalWeight)
        );
        assert!(matches!(
            GuessPrep::weighted(vec![f64::NAN]),
            Err(Error::NonFiniteWeight { index: 0 })
        ));
        assert!(matches!(
            prepare(&GuessPrep::UniformFourier, MAX_DIM + 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn weighted_normalizes() {
        let GuessPrep::Weighted { weights } = GuessPrep::weighted(vec![2.0, 6.0]).unwrap() else {
            unreachable!()
        };
        assert_eq!(weights, vec![0.25, 0.75]);
    }

    #[test]
    fn good_probability_examples() {
        let uniform = prepare(&GuessPrep::UniformFourier, 4).unwrap();
        let single = Oracle::new(4, [0]).unwrap();
        assert!(approx(good_probability(&uniform, &single).unwrap(), 0.25));

        let weighted = prepare(
            &GuessPrep::weighted(vec![0.64, 0.12, 0.12, 0.12]).unwrap(),
            4,
        )
        .unwrap();
        assert!(approx(good_probability(&weighted, &single).unwrap(), 0.64));

        let empty = Oracle::new(4, []).unwrap();
        assert_eq!(good_probability(&weighted, &empty).unwrap(), 0.0);

        let wrong = Oracle::new(5, [0]).unwrap();
        assert!(matches!(
            good_probability(&uniform, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sf_examples() {
        let uniform = prepare(&GuessPrep::UniformFourier, 4).unwrap();
        let flipped = apply_sf(&uniform, &Oracle::new(4, [0]).unwrap()).unwrap();
        assert_eq!(re(&flipped), vec![-0.5, 0.5, 0.5, 0.5]);

        let same = apply_sf(&uniform, &Oracle::new(4, []).unwrap()).unwrap();
        assert_eq!(same, uniform);

        let point = StateVector::basis(4, 0).unwrap();
        let all = Oracle::new(4, 0..4).unwrap();
        assert_eq!(
            re(&apply_sf(&point, &all).unwrap()),
            vec![-1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn q_single_step_finds_the_item() {
        let prep = GuessPrep::UniformFourier;
        let oracle = Oracle::new(4, [0]).unwrap();
        let s = prepare(&prep, 4).unwrap();
        let out = apply_q(&s, &prep, &oracle).unwrap();
        assert!(approx(out.amplitudes()[0].norm(), 1.0));
        for a in &out.amplitudes()[1..] {
            assert!(a.norm() < 1e-9);
        }
    }

    #[test]
    fn q_fixes_guess_state_without_good_items() {
        let prep = GuessPrep::weighted(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let oracle = Oracle::new(4, []).unwrap();
        let s = prepare(&prep, 4).unwrap();
        let out = apply_q(&s, &prep, &oracle).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_delta_and_constant() {
        for n in [1, 3, 4, 7, 16] {
            let delta = StateVector::basis(n, 0).unwrap();
            let f = qft(&delta, Direction::Forward);
            let expected = 1.0 / (n as f64).sqrt();
            assert!(f
                .amplitudes()
                .iter()
                .all(|a| (a - Complex64::new(expected, 0.0)).norm() < 1e-12));
        }
        let uniform = prepare(&GuessPrep::UniformFourier, 4).unwrap();
        let f = qft(&uniform, Direction::Forward);
        assert!((f.amplitudes()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(f.amplitudes()[1..].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn measure_point_mass() {
        let s = StateVector::basis(4, 2).unwrap();
        for seed in [0, 1, 99] {
            assert_eq!(measure(&s, seed, 5).unwrap(), vec![2; 5]);
        }
        assert!(matches!(measure(&s, 0, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rejects_unnormalized_input() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(StateVector::from_real(&[]), Err(Error::EmptyDimension));
    }

    #[test]
    fn oracle_bookkeeping() {
        let o = Oracle::new(5, [4, 1, 1]).unwrap();
        assert_eq!(o.good_count(), 2);
        assert_eq!(o.good_indices().collect::<Vec<_>>(), vec![1, 4]);
        assert!(!o.is_good(7));
        assert_eq!(
            Oracle::new(3, [3]),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        );
        assert_eq!(Oracle::new(0, []), Err(Error::EmptyDimension));
    }
}
