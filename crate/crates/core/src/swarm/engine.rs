use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ops::{
    accept_candidate, local_walk_ba, local_walk_mba, sample_frequency, update_loudness, update_position,
    update_pulse_rate, update_velocity,
};
use super::{seeded_rng, BatState, BestRecord, Objective, RunResult, SearchSpace, SwarmConfig, SwarmRng};
use crate::error::{Error, Result};

/// Which local-walk rule the engine uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Original bat algorithm: walk `x* + ε·<A>`.
    Ba,
    /// Modified bat algorithm: walk `x* + ε·<A> + A*`.
    Mba,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Ba => "ba",
            Variant::Mba => "mba",
        })
    }
}

/// A running population, advanced one iteration at a time.
///
/// Generator consumption is fixed so runs replay exactly from the seed:
/// initialization draws one uniform per coordinate per bat (bat-major), then
/// every iteration visits bats in index order and draws
///
/// 1. `beta` for the frequency,
/// 2. the walk trigger `u`, compared against the bat's pulse rate,
/// 3. `dim` values of ε, only when the walk fires,
/// 4. whatever the objective draws while evaluating the candidate,
/// 5. the acceptance `u`, compared against the bat's loudness.
pub struct Swarm<'a, O: ?Sized> {
    objective: &'a O,
    space: &'a SearchSpace,
    cfg: SwarmConfig,
    variant: Variant,
    rng: SwarmRng,
    bats: Vec<BatState>,
    best: BestRecord,
    initial_best_fitness: f64,
    trace: Vec<f64>,
    evaluations: u64,
}

impl<'a, O: Objective + ?Sized> Swarm<'a, O> {
    /// Validates the configuration, then places and evaluates the population.
    pub fn new(objective: &'a O, space: &'a SearchSpace, cfg: SwarmConfig, variant: Variant) -> Result<Self> {
        cfg.validate()?;
        let mut rng = seeded_rng(cfg.rng_seed);
        let dim = space.dim();

        let positions: Vec<Vec<f64>> = (0..cfg.population_size)
            .map(|_| {
                space
                    .lower()
                    .iter()
                    .zip(space.upper())
                    .map(|(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                    .collect()
            })
            .collect();

        let mut bats = Vec::with_capacity(cfg.population_size);
        let mut evaluations = 0;
        for position in positions {
            let fitness = checked_eval(objective, &position, &mut rng)?;
            evaluations += 1;
            bats.push(BatState {
                position,
                velocity: vec![0.0; dim],
                frequency: 0.0,
                loudness: cfg.initial_loudness,
                pulse_rate: update_pulse_rate(cfg.initial_pulse_rate, cfg.gamma, 0),
                fitness,
                acceptances: 0,
            });
        }

        let leader = bats
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.fitness.total_cmp(&b.fitness))
            .map(|(i, _)| i)
            .expect("population is non-empty");
        let best = BestRecord {
            best_position: bats[leader].position.clone(),
            best_fitness: bats[leader].fitness,
            best_loudness: cfg.initial_loudness,
        };

        Ok(Self {
            objective,
            space,
            initial_best_fitness: best.best_fitness,
            trace: Vec::with_capacity(cfg.max_iterations),
            cfg,
            variant,
            rng,
            bats,
            best,
            evaluations,
        })
    }

    pub fn bats(&self) -> &[BatState] {
        &self.bats
    }

    pub fn best(&self) -> &BestRecord {
        &self.best
    }

    pub fn iteration(&self) -> usize {
        self.trace.len()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn is_done(&self) -> bool {
        self.trace.len() >= self.cfg.max_iterations
    }

    fn average_loudness(&self) -> f64 {
        self.bats.iter().map(|b| b.loudness).sum::<f64>() / self.bats.len() as f64
    }

    /// Runs one full iteration over the population.
    pub fn step(&mut self) -> Result<()> {
        for i in 0..self.bats.len() {
            self.move_bat(i)?;
        }
        self.trace.push(self.best.best_fitness);
        Ok(())
    }

    fn move_bat(&mut self, i: usize) -> Result<()> {
        let beta: f64 = self.rng.gen();
        let frequency = sample_frequency(beta, &self.cfg);
        let bat = &mut self.bats[i];
        bat.frequency = frequency;
        bat.velocity = update_velocity(&bat.velocity, &bat.position, &self.best.best_position, frequency);
        let mut candidate = update_position(&bat.position, &bat.velocity, self.space);

        let walk_trigger: f64 = self.rng.gen();
        if walk_trigger > self.bats[i].pulse_rate {
            let avg = self.average_loudness();
            candidate = match self.variant {
                Variant::Ba => local_walk_ba(&self.best.best_position, avg, &mut self.rng),
                Variant::Mba => local_walk_mba(&self.best, avg, &mut self.rng),
            };
            self.space.clamp(&mut candidate);
        }

        let f_candidate = checked_eval(self.objective, &candidate, &mut self.rng)?;
        self.evaluations += 1;

        let u: f64 = self.rng.gen();
        let bat = &mut self.bats[i];
        if accept_candidate(u, bat.loudness, f_candidate, self.best.best_fitness) {
            bat.position = candidate;
            bat.fitness = f_candidate;
            bat.loudness = update_loudness(bat.loudness, self.cfg.alpha);
            bat.acceptances += 1;
            bat.pulse_rate = update_pulse_rate(self.cfg.initial_pulse_rate, self.cfg.gamma, bat.acceptances);

            // Acceptance implies a strict improvement on the incumbent.
            self.best.best_position.clone_from(&bat.position);
            self.best.best_fitness = bat.fitness;
            if self.variant == Variant::Mba {
                self.best.best_loudness = bat.loudness;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> RunResult {
        RunResult {
            best: self.best,
            initial_best_fitness: self.initial_best_fitness,
            trace: self.trace,
            evaluations: self.evaluations,
        }
    }

    /// Steps until `max_iterations` and returns the result.
    pub fn run_to_end(mut self) -> Result<RunResult> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(self.finish())
    }
}

fn checked_eval<O: Objective + ?Sized>(objective: &O, x: &[f64], rng: &mut SwarmRng) -> Result<f64> {
    let value = objective.evaluate(x, rng);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective {
            value,
            position: x.to_vec(),
        })
    }
}

pub fn run<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    cfg: &SwarmConfig,
    variant: Variant,
) -> Result<RunResult> {
    Swarm::new(objective, space, cfg.clone(), variant)?.run_to_end()
}

/// Runs the original bat algorithm.
pub fn run_ba<O: Objective + ?Sized>(objective: &O, space: &SearchSpace, cfg: &SwarmConfig) -> Result<RunResult> {
    run(objective, space, cfg, Variant::Ba)
}

/// Runs the modified bat algorithm, which keeps the best bat's loudness as memory.
pub fn run_mba<O: Objective + ?Sized>(objective: &O, space: &SearchSpace, cfg: &SwarmConfig) -> Result<RunResult> {
    run(objective, space, cfg, Variant::Mba)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn small_cfg(seed: u64) -> SwarmConfig {
        SwarmConfig {
            population_size: 10,
            max_iterations: 50,
            rng_seed: seed,
            ..SwarmConfig::default()
        }
    }

    #[test]
    fn trace_has_one_entry_per_iteration() {
        let space = SearchSpace::uniform(5, -10.0, 10.0).unwrap();
        let res = run_ba(&sphere, &space, &small_cfg(1)).unwrap();
        assert_eq!(res.trace.len(), 50);
        assert_eq!(res.evaluations, 10 * 51);
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.trace[0] <= res.initial_best_fitness);
    }

    #[test]
    fn ba_and_mba_share_initial_population() {
        let space = SearchSpace::uniform(4, -3.0, 3.0).unwrap();
        let a = Swarm::new(&sphere, &space, small_cfg(9), Variant::Ba).unwrap();
        let b = Swarm::new(&sphere, &space, small_cfg(9), Variant::Mba).unwrap();
        assert_eq!(a.bats(), b.bats());
        assert_eq!(a.best(), b.best());
    }

    #[test]
    fn mba_best_loudness_starts_at_initial_loudness() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let cfg = SwarmConfig {
            initial_loudness: 0.7,
            ..small_cfg(2)
        };
        let swarm = Swarm::new(&sphere, &space, cfg, Variant::Mba).unwrap();
        assert_eq!(swarm.best().best_loudness, 0.7);
    }

    #[test]
    fn non_finite_objective_aborts_with_position() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let bad = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { 0.0 };
        let err = run_mba(&bad, &space, &small_cfg(4)).unwrap_err();
        match err {
            Error::NonFiniteObjective { value, position } => {
                assert!(value.is_nan());
                assert!(position[0] > 0.5);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let cfg = SwarmConfig {
            alpha: 1.5,
            ..small_cfg(0)
        };
        assert!(matches!(run_ba(&sphere, &space, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn best_loudness_tracks_the_improving_bat() {
        let space = SearchSpace::uniform(3, -5.0, 5.0).unwrap();
        let mut swarm = Swarm::new(&sphere, &space, small_cfg(21), Variant::Mba).unwrap();
        while !swarm.is_done() {
            let before = swarm.best().clone();
            let loud_before: Vec<f64> = swarm.bats().iter().map(|b| b.loudness).collect();
            swarm.step().unwrap();
            let after = swarm.best();
            if after.best_position != before.best_position {
                // The stored loudness belongs to some bat that decayed this iteration.
                assert!(swarm
                    .bats()
                    .iter()
                    .zip(&loud_before)
                    .any(|(b, prev)| b.loudness < *prev && b.loudness == after.best_loudness));
            } else {
                assert_eq!(after.best_loudness, before.best_loudness);
            }
        }
    }
}
