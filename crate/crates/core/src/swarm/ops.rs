use rand::Rng;

use super::{BestRecord, SearchSpace, SwarmConfig};

/// Frequency `f_min + (f_max - f_min) * beta` for a uniform draw `beta` in [0, 1].
pub fn sample_frequency(beta: f64, cfg: &SwarmConfig) -> f64 {
    cfg.f_min + (cfg.f_max - cfg.f_min) * beta
}

/// `v_prev + (x - x_best) * frequency`, component-wise.
///
/// The drive term is bat-minus-best.
pub fn update_velocity(v_prev: &[f64], x: &[f64], x_best: &[f64], frequency: f64) -> Vec<f64> {
    assert_eq!(v_prev.len(), x.len(), "velocity/position dimension mismatch");
    assert_eq!(x.len(), x_best.len(), "position/best dimension mismatch");
    v_prev
        .iter()
        .zip(x.iter().zip(x_best))
        .map(|(v, (xi, bi))| v + (xi - bi) * frequency)
        .collect()
}

/// `x_prev + v`, clamped into the search space.
pub fn update_position(x_prev: &[f64], v: &[f64], space: &SearchSpace) -> Vec<f64> {
    assert_eq!(x_prev.len(), v.len(), "position/velocity dimension mismatch");
    let mut x: Vec<f64> = x_prev.iter().zip(v).map(|(a, b)| a + b).collect();
    space.clamp(&mut x);
    x
}

/// Deterministic core of the BA walk: `x_base + eps * avg_loudness`.
pub fn walk_step(x_base: &[f64], eps: &[f64], avg_loudness: f64) -> Vec<f64> {
    assert_eq!(x_base.len(), eps.len(), "walk dimension mismatch");
    x_base.iter().zip(eps).map(|(x, e)| x + e * avg_loudness).collect()
}

/// Deterministic core of the MBA walk: `x_best + eps * avg_loudness + best_loudness`.
///
/// `best_loudness` is a scalar added to every coordinate.
pub fn walk_step_mba(x_best: &[f64], eps: &[f64], avg_loudness: f64, best_loudness: f64) -> Vec<f64> {
    assert_eq!(x_best.len(), eps.len(), "walk dimension mismatch");
    x_best
        .iter()
        .zip(eps)
        .map(|(x, e)| (x + e * avg_loudness) + best_loudness)
        .collect()
}

fn draw_eps<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Random walk around `x_base` with per-coordinate ε ~ U[-1, 1].
///
/// Not clamped; the engine clamps the result.
pub fn local_walk_ba<R: Rng + ?Sized>(x_base: &[f64], avg_loudness: f64, rng: &mut R) -> Vec<f64> {
    let eps = draw_eps(x_base.len(), rng);
    walk_step(x_base, &eps, avg_loudness)
}

/// Modified walk from the incumbent best, shifted by the stored best loudness.
///
/// Consumes the generator exactly like [`local_walk_ba`].
pub fn local_walk_mba<R: Rng + ?Sized>(best: &BestRecord, avg_loudness: f64, rng: &mut R) -> Vec<f64> {
    let eps = draw_eps(best.best_position.len(), rng);
    walk_step_mba(&best.best_position, &eps, avg_loudness, best.best_loudness)
}

pub fn update_loudness(loudness: f64, alpha: f64) -> f64 {
    alpha * loudness
}

/// Pulse-rate schedule `r0 * (1 - exp(-gamma * t))`.
pub fn update_pulse_rate(r0: f64, gamma: f64, t: u32) -> f64 {
    r0 * (1.0 - (-gamma * f64::from(t)).exp())
}

/// Acceptance gate: `u < loudness` and the candidate strictly beats the best.
pub fn accept_candidate(u: f64, loudness: f64, f_candidate: f64, f_best: f64) -> bool {
    u < loudness && f_candidate < f_best
}
