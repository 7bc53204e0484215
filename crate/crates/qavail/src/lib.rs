//! Statevector simulation of amplitude amplification, amplitude estimation
//! and quantum counting over arbitrary weighted guess states, plus an
//! experiment harness that models the availability heuristic with them.
//!
//! The modules build on each other:
//!
//! - [`statevec`]: dense amplitudes, oracles, guess-state preparation, the
//!   amplification operator `Q`, Fourier transforms and seeded measurement.
//! - [`amplify`]: the iteration schedule `⌊π/(4θ)⌋`, exact success
//!   probabilities, single retrieval runs, and the two availability metrics.
//! - [`estimate`]: phase estimation of `Q` through an `M`-dimensional register,
//!   both by joint simulation and by a closed-form kernel.
//! - [`count`]: `N ×` the amplitude estimate, biased whenever the guess state is.
//! - [`cognition`]: lexicons, letter-position partitions, salience-weighted
//!   groups, and recall/estimate agreement statistics.
//!
//! ```
//! use qavail::{amplify, count, GuessPrep, Oracle};
//!
//! let oracle = Oracle::new(4, [0]).unwrap();
//! let sched = amplify::schedule(0.25).unwrap();
//! assert_eq!(sched.iterations, 1);
//!
//! let c = count::count(&GuessPrep::UniformFourier, &oracle, 6, 42).unwrap();
//! assert_eq!(c.t_hat, 1.0);
//! ```

pub mod amplify;
pub mod cognition;
pub mod count;
pub mod error;
pub mod estimate;
pub mod statevec;

pub use error::{Error, Result};
pub use statevec::{Direction, GuessPrep, Oracle, StateVector};
