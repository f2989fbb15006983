//! Bat Algorithm (BA) and Modified Bat Algorithm (MBA) engines.
//!
//! Both engines share one iteration loop. Each bat carries a frequency-tuned
//! velocity, a loudness that gates acceptance, and a pulse rate that decides
//! how often it abandons its flight candidate for a random walk around the
//! incumbent best. The MBA differs only in the walk: it starts from the best
//! position and adds the stored loudness of the bat that last improved it.

mod engine;
mod ops;

pub use engine::{run, run_ba, run_mba, Swarm, Variant};
pub use ops::{
    accept_candidate, local_walk_ba, local_walk_mba, sample_frequency, update_loudness, update_position,
    update_pulse_rate, update_velocity, walk_step, walk_step_mba,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random generator owned by a single run.
pub type SwarmRng = ChaCha8Rng;

/// Builds the generator for a run from its seed.
pub fn seeded_rng(seed: u64) -> SwarmRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hyperparameters of one optimizer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub f_min: f64,
    pub f_max: f64,
    /// Loudness decay factor, in (0, 1).
    pub alpha: f64,
    /// Pulse-rate growth factor, > 0.
    pub gamma: f64,
    pub initial_loudness: f64,
    /// Asymptotic pulse rate r⁰, in [0, 1].
    pub initial_pulse_rate: f64,
    pub rng_seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            max_iterations: 500,
            f_min: 0.0,
            f_max: 2.0,
            alpha: 0.9,
            gamma: 0.9,
            initial_loudness: 1.0,
            initial_pulse_rate: 0.5,
            rng_seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size == 0 {
            return fail("population_size must be positive".into());
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be positive".into());
        }
        if !(self.f_min.is_finite() && self.f_max.is_finite()) || self.f_min > self.f_max {
            return fail(format!(
                "need finite f_min <= f_max, got [{}, {}]",
                self.f_min, self.f_max
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.initial_loudness > 0.0 && self.initial_loudness.is_finite()) {
            return fail(format!(
                "initial_loudness must be positive, got {}",
                self.initial_loudness
            ));
        }
        if !(0.0..=1.0).contains(&self.initial_pulse_rate) {
            return fail(format!(
                "initial_pulse_rate must lie in [0, 1], got {}",
                self.initial_pulse_rate
            ));
        }
        Ok(())
    }
}

/// Box-bounded search domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidSpace(format!(
                "lower has {} coordinates, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSpace(format!(
                    "coordinate {d}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same bounds on every coordinate.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Clamps every coordinate into its bounds in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// One bat of the population.
#[derive(Clone, Debug, PartialEq)]
pub struct BatState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub frequency: f64,
    pub loudness: f64,
    pub pulse_rate: f64,
    pub fitness: f64,
    /// Number of accepted moves; drives the pulse-rate schedule.
    pub acceptances: u32,
}

/// Incumbent best solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRecord {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Loudness of the bat that produced the incumbent (MBA memory).
    pub best_loudness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best: BestRecord,
    /// Best fitness after population initialization, before any iteration.
    pub initial_best_fitness: f64,
    /// Best fitness after each iteration.
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

/// A function to minimize.
///
/// The run's generator is handed to every call so that stochastic objectives
/// (the noisy quartic) stay reproducible under the run seed. Deterministic
/// objectives ignore it.
pub trait Objective {
    fn evaluate(&self, x: &[f64], rng: &mut SwarmRng) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, x: &[f64], _rng: &mut SwarmRng) -> f64 {
        self(x)
    }
}
