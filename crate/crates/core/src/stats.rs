//! Descriptive summaries and the two-sided Wilcoxon rank-sum test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::benchmarks::FunctionId;
use crate::error::{Error, Result};

/// Significance threshold applied in comparison tables.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Largest smaller-sample size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(sample: &[f64]) -> Result<SampleSummary> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InsufficientSample { needed: 2, got: n });
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
    let min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SampleSummary {
        n,
        // Rounding can push the mean of a constant sample past its extremes.
        mean: mean.clamp(min, max),
        std_dev: (ss / (n - 1) as f64).sqrt(),
        min,
        max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSumMethod {
    NormalApprox,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumReport {
    /// Mann–Whitney U of the first sample: its rank sum minus n(n+1)/2.
    pub u_statistic: f64,
    /// Continuity-corrected normal score of U.
    pub z_score: f64,
    pub p_value: f64,
    pub method: RankSumMethod,
    /// Every pooled value is identical; the test carries no information.
    pub degenerate: bool,
}

struct Pooled {
    n: usize,
    m: usize,
    u: f64,
    /// Σ (t³ − t) over tie groups.
    tie_term: f64,
    has_ties: bool,
}

fn pool(a: &[f64], b: &[f64]) -> Result<Pooled> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut tagged: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    tagged.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut i = 0;
    while i < tagged.len() {
        let mut j = i + 1;
        while j < tagged.len() && tagged[j].0 == tagged[i].0 {
            j += 1;
        }
        // Positions i..j share the average of ranks i+1..=j.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        rank_sum_a += avg_rank * tagged[i..j].iter().filter(|p| p.1).count() as f64;
        let t = (j - i) as f64;
        if j - i > 1 {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        i = j;
    }
    let n = a.len();
    Ok(Pooled {
        n,
        m: b.len(),
        u: rank_sum_a - (n * (n + 1)) as f64 / 2.0,
        tie_term,
        has_ties,
    })
}

/// Normal score with tie-corrected variance and 0.5 continuity correction.
/// Returns `None` when the variance vanishes.
fn corrected_z(p: &Pooled) -> Option<f64> {
    let (n, m) = (p.n as f64, p.m as f64);
    let total = n + m;
    let mean = n * m / 2.0;
    let var = if total > 1.0 {
        n * m / 12.0 * ((total + 1.0) - p.tie_term / (total * (total - 1.0)))
    } else {
        0.0
    };
    if var <= 0.0 {
        return None;
    }
    let diff = p.u - mean;
    let corrected = (diff.abs() - 0.5).max(0.0);
    Some(diff.signum() * corrected / var.sqrt())
}

fn two_sided_normal(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Number of arrangements giving each value of U for sample sizes `n`, `m`.
///
/// Uses `c(i, j, u) = c(i − 1, j, u − j) + c(i, j − 1, u)`, i.e. the largest
/// pooled value belongs either to the first sample (beating all `j` of the
/// second) or to the second.
pub fn rank_sum_null_counts(n: usize, m: usize) -> Vec<f64> {
    let max_u = n * m;
    // layer[i][u] holds c(i, j, u) for the current j.
    let mut layer = vec![vec![0.0_f64; max_u + 1]; n + 1];
    for row in layer.iter_mut() {
        row[0] = 1.0; // j = 0: only U = 0 is reachable
    }
    for j in 1..=m {
        for i in 1..=n {
            let (done, rest) = layer.split_at_mut(i);
            let prev_i = &done[i - 1];
            let cur = &mut rest[0];
            // cur currently holds c(i, j − 1, ·); add c(i − 1, j, u − j).
            for u in (j..=i * j).rev() {
                cur[u] += prev_i[u - j];
            }
        }
    }
    layer.swap_remove(n)
}

/// Exact two-sided p-value from the null distribution of U.
///
/// Fails over to the normal approximation's contract by returning `None` when
/// the data contain ties.
pub fn rank_sum_exact(a: &[f64], b: &[f64]) -> Result<Option<RankSumReport>> {
    let p = pool(a, b)?;
    if p.has_ties {
        return Ok(None);
    }
    let counts = rank_sum_null_counts(p.n, p.m);
    let total: f64 = counts.iter().sum();
    let u = p.u.round() as usize;
    let lower: f64 = counts[..=u].iter().sum();
    let upper: f64 = counts[u..].iter().sum();
    let p_value = (2.0 * lower.min(upper) / total).min(1.0);
    Ok(Some(RankSumReport {
        u_statistic: p.u,
        z_score: corrected_z(&p).unwrap_or(0.0),
        p_value,
        method: RankSumMethod::Exact,
        degenerate: false,
    }))
}

/// Normal approximation, valid with or without ties.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> Result<RankSumReport> {
    let p = pool(a, b)?;
    let (z, p_value, degenerate) = match corrected_z(&p) {
        Some(z) => (z, two_sided_normal(z), false),
        None => (0.0, 1.0, true),
    };
    Ok(RankSumReport {
        u_statistic: p.u,
        z_score: z,
        p_value,
        method: RankSumMethod::NormalApprox,
        degenerate,
    })
}

/// Two-sided rank-sum test: exact when the smaller sample has at most
/// [`EXACT_MAX_N`] values and there are no ties, normal approximation otherwise.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumReport> {
    if a.len().min(b.len()) <= EXACT_MAX_N {
        if let Some(report) = rank_sum_exact(a, b)? {
            return Ok(report);
        }
    }
    rank_sum_normal(a, b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub id: FunctionId,
    pub report: RankSumReport,
    pub significant: bool,
}

/// One rank-sum row per function, flagged when p < [`SIGNIFICANCE_LEVEL`].
pub fn significance_table(pairs: &[(FunctionId, Vec<f64>, Vec<f64>)]) -> Result<Vec<SignificanceRow>> {
    pairs
        .iter()
        .map(|(id, ba, mba)| {
            let report = rank_sum_test(ba, mba)?;
            Ok(SignificanceRow {
                id: *id,
                significant: !report.degenerate && report.p_value < SIGNIFICANCE_LEVEL,
                report,
            })
        })
        .collect()
}
