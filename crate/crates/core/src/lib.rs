//! Bat-inspired swarm optimizers and the tooling to compare them.
//!
//! * [`swarm`]: the original and modified bat algorithm engines.
//! * [`benchmarks`]: the 23 classical test functions.
//! * [`stats`]: summaries and the Wilcoxon rank-sum test.
//! * [`assignment`]: worker–job assignment via random-key decoding.
//! * [`experiment`]: seeded multi-run experiments and their reports.

pub mod assignment;
pub mod benchmarks;
pub mod error;
pub mod experiment;
pub mod stats;
pub mod swarm;

pub use error::{Error, Result};
