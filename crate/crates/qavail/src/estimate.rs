//! Amplitude estimation through an `M`-dimensional Fourier register.
//!
//! The joint state starts as `F_M|0⟩ ⊗ A|0⟩`, register value `j` receives
//! `Qʲ`, and an inverse Fourier transform on the register turns the two
//! eigenphases `±θ/π` of `Q` into peaks at `y ≈ Mθ/π` and `y ≈ M(1-θ/π)`.
//! Either peak maps back to the same estimate `sin²(πy/M)`.
//!
//! [`kernel_distribution`] gives the same outcome law in closed form and is
//! kept independent of the simulation so the two can check each other.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::amplify::checked_probability;
use crate::error::{Error, Result};
use crate::statevec::{check_dim, sample_indices, AmplificationOperator, GuessPrep, Oracle};

/// Default cap on the joint dimension `M·N`.
pub const DEFAULT_JOINT_CAP: usize = 1 << 24;

/// Default lower bound applied by [`choose_m`].
pub const DEFAULT_MIN_REGISTER: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    register_dim: usize,
    prep: GuessPrep,
    oracle: Oracle,
    joint_cap: usize,
}

impl EstimationConfig {
    pub fn new(register_dim: usize, prep: GuessPrep, oracle: Oracle) -> Result<Self> {
        Self::with_joint_cap(register_dim, prep, oracle, DEFAULT_JOINT_CAP)
    }

    pub fn with_joint_cap(
        register_dim: usize,
        prep: GuessPrep,
        oracle: Oracle,
        joint_cap: usize,
    ) -> Result<Self> {
        if register_dim == 0 {
            return Err(Error::EmptyRegister);
        }
        if let Some(dim) = prep.fixed_dim() {
            check_dim(oracle.dim(), dim)?;
        }
        let requested = register_dim.saturating_mul(oracle.dim());
        if requested > joint_cap {
            return Err(Error::CapExceeded {
                requested,
                cap: joint_cap,
            });
        }
        Ok(Self {
            register_dim,
            prep,
            oracle,
            joint_cap,
        })
    }

    pub fn register_dim(&self) -> usize {
        self.register_dim
    }

    pub fn prep(&self) -> &GuessPrep {
        &self.prep
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn joint_cap(&self) -> usize {
        self.joint_cap
    }

    /// Controlled-`Q` applications in `Λ_M(Q)`: `Σ_{j<M} j = M(M-1)/2`.
    pub fn q_applications(&self) -> u64 {
        let m = self.register_dim as u64;
        m * (m - 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationOutcome {
    /// Measured register value.
    pub y: usize,
    /// `sin²(πy/M)`.
    pub a_hat: f64,
    /// Probability of every register outcome.
    pub distribution: Vec<f64>,
    pub q_applications: u64,
}

/// The estimate `sin²(πy/M)` attached to register outcome `y`.
///
/// `y` is folded onto `min(y, M - y)` first so mirrored outcomes give bit-identical values.
///
/// The angle `πy/M` is carried as a double-double, so rational points such as
/// `y/M = 1/6` land exactly on `0.25`.
pub fn register_estimate(y: usize, register_dim: usize) -> f64 {
    let y = y.min(register_dim.saturating_sub(y));
    let (yf, mf) = (y as f64, register_dim as f64);
    let r_hi = yf / mf;
    let r_lo = (-r_hi).mul_add(mf, yf) / mf;
    if 8 * y < register_dim {
        let (x_hi, x_lo) = times_pi(r_hi, r_lo);
        let s = x_hi.sin() + x_hi.cos() * x_lo;
        s * s
    } else {
        let (x_hi, x_lo) = times_pi(2.0 * r_hi, 2.0 * r_lo);
        let c = x_hi.cos() - x_hi.sin() * x_lo;
        (1.0 - c) / 2.0
    }
}

/// Low half of `π` beyond its nearest `f64`.
const PI_LO: f64 = 1.2246467991473532e-16;

/// `π · (hi + lo)` as a double-double.
fn times_pi(hi: f64, lo: f64) -> (f64, f64) {
    let x_hi = PI * hi;
    let x_lo = PI.mul_add(hi, -x_hi) + PI * lo + PI_LO * hi;
    (x_hi, x_lo)
}

/// Exact distribution of the register measurement, by joint statevector simulation.
pub fn est_amp_distribution(cfg: &EstimationConfig) -> Result<Vec<f64>> {
    let m = cfg.register_dim;
    let n = cfg.oracle.dim();
    let op = AmplificationOperator::new(&cfg.prep, &cfg.oracle)?;

    // Item-major layout: joint[x*M + j] is the amplitude of |j⟩|x⟩.
    let mut joint = vec![Complex64::new(0.0, 0.0); m * n];
    let mut slice: Vec<Complex64> = op.guess_state().amplitudes().to_vec();
    let register_amp = 1.0 / (m as f64).sqrt();
    for j in 0..m {
        for (x, a) in slice.iter().enumerate() {
            joint[x * m + j] = a * register_amp;
        }
        if j + 1 < m {
            op.apply_in_place(&mut slice);
        }
    }

    // Inverse transform on the register, one item column at a time.
    let fft = FftPlanner::new().plan_fft_forward(m);
    let scale = register_amp;
    joint.par_chunks_mut(m).for_each(|column| {
        fft.process(column);
        column.iter_mut().for_each(|a| *a *= scale);
    });

    let mut distribution = vec![0.0; m];
    for column in joint.chunks(m) {
        for (p, a) in distribution.iter_mut().zip(column) {
            *p += a.norm_sqr();
        }
    }
    Ok(distribution)
}

/// Samples one register outcome under `seed`.
pub fn est_amp(cfg: &EstimationConfig, seed: u64) -> Result<EstimationOutcome> {
    let distribution = est_amp_distribution(cfg)?;
    sample_outcome(cfg, distribution, seed)
}

/// Samples from an already computed distribution for `cfg`.
pub fn sample_outcome(
    cfg: &EstimationConfig,
    distribution: Vec<f64>,
    seed: u64,
) -> Result<EstimationOutcome> {
    check_dim(cfg.register_dim, distribution.len())?;
    let y = sample_indices(&distribution, seed, 1)?[0];
    Ok(EstimationOutcome {
        y,
        a_hat: register_estimate(y, cfg.register_dim),
        distribution,
        q_applications: cfg.q_applications(),
    })
}

/// Fejér-type kernel `sin²(Mπδ) / (M² sin²(πδ))`, equal to 1 at integer `δ`.
fn fejer(delta: f64, register_dim: usize) -> f64 {
    let r = delta - delta.round();
    let denom = (PI * r).sin();
    if denom.abs() < 1e-15 {
        return 1.0;
    }
    let m = register_dim as f64;
    let num = (m * PI * r).sin();
    (num * num) / (m * m * denom * denom)
}

/// Closed-form outcome law of the register for good probability `a`.
///
/// `P(y) = ½·[K(y/M - θ/π) + K(y/M + θ/π)]` with `θ = arcsin(√a)`.
pub fn kernel_distribution(a: f64, register_dim: usize) -> Result<Vec<f64>> {
    let a = checked_probability(a)?;
    if register_dim == 0 {
        return Err(Error::EmptyRegister);
    }
    let phase = a.sqrt().asin() / PI;
    let m = register_dim as f64;
    Ok((0..register_dim)
        .map(|y| {
            let at = y as f64 / m;
            if a == 0.0 || a == 1.0 {
                // Single eigenvector: the two terms coincide.
                fejer(at - phase, register_dim)
            } else {
                0.5 * (fejer(at - phase, register_dim) + fejer(at + phase, register_dim))
            }
        })
        .collect())
}

/// `max(⌊1/√a⌋, DEFAULT_MIN_REGISTER)`.
pub fn choose_m(a_prior: f64) -> Result<usize> {
    choose_m_with_min(a_prior, DEFAULT_MIN_REGISTER)
}

pub fn choose_m_with_min(a_prior: f64, min_register: usize) -> Result<usize> {
    let a = checked_probability(a_prior)?;
    if a == 0.0 {
        return Err(Error::InvalidProbability(a_prior));
    }
    let ratio = 1.0 / a.sqrt();
    let nearest = ratio.round();
    let base = if (ratio - nearest).abs() < 1e-9 {
        nearest
    } else {
        ratio.floor()
    } as usize;
    Ok(base.max(min_register).max(1))
}

/// Half the L1 distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dim(p.len(), q.len())?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Error radius `(2π√(a(1-a)) + π²/M)/M` that holds with probability at least `8/π²`.
pub fn accuracy_bound(a: f64, register_dim: usize) -> f64 {
    let m = register_dim as f64;
    (2.0 * PI * (a * (1.0 - a)).max(0.0).sqrt() + PI * PI / m) / m
}

/// Index of the most likely outcome; the lowest index wins ties.
pub fn modal_outcome(distribution: &[f64]) -> usize {
    let mut best = 0;
    for (y, &p) in distribution.iter().enumerate() {
        if p > distribution[best] + 1e-12 {
            best = y;
        }
    }
    best
}
