//! The code listings of the guide in `book/src`, run as doc-tests.
//!
//! Each chapter is its own module so a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/statevector.md")]
pub mod statevector {}
#[doc = include_str!("../../../book/src/amplification.md")]
pub mod amplification {}
#[doc = include_str!("../../../book/src/availability.md")]
pub mod availability {}
#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}
#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}
#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
