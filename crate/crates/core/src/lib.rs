//! Hybrid active/passive relay model: point-process simulator, closed-form success
//! probabilities, bandit mode selection, and the experiment harness built on them.

// `!(x > 0.0)` checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bandit;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod params;
pub mod relay_sim;
pub mod rng;

pub use error::{Error, Result};
pub use params::{SaturationRule, SystemParams};
pub use rng::SeedPath;
