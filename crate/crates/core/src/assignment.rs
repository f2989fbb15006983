//! Worker–job assignment: cost matrices, random-key decoding, an exhaustive
//! oracle, and the MBA-driven solver.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swarm::{run_mba, RunResult, SearchSpace, SwarmConfig};

/// Largest `n` the exhaustive search accepts (10! = 3 628 800 permutations).
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Square matrix of non-negative costs; `cost[j][w]` is the time worker `w` needs for job `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    costs: Vec<Vec<f64>>,
}

impl CostMatrix {
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("matrix is empty".into()));
        }
        for (j, row) in costs.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {j} has {} columns, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
            for (w, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry at row {j}, column {w} must be finite and non-negative, got {c}"
                    )));
                }
            }
        }
        Ok(Self { costs })
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn cost(&self, job: usize, worker: usize) -> f64 {
        self.costs[job][worker]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.costs
    }

    /// Parses `n` lines of `n` comma-separated decimals. A first line that
    /// does not parse as numbers is treated as a header and skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if line == 0 => continue,
                Err(_) => {
                    let (col, field) = record
                        .iter()
                        .enumerate()
                        .find(|(_, f)| f.parse::<f64>().is_err())
                        .expect("some field failed to parse");
                    return Err(Error::InvalidMatrix(format!(
                        "row {}, column {col}: cannot parse {field:?} as a number",
                        rows.len()
                    )));
                }
            }
        }
        Self::new(rows)
    }

    /// Parses `{"costs": [[...], ...]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            costs: Vec<Vec<f64>>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Self::new(raw.costs)
    }

    /// Loads CSV or JSON, chosen by extension (`.json` means JSON).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_csv_str(&text)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `perm[j]` is the worker assigned to job `j`.
    pub perm: Vec<usize>,
    pub total_cost: f64,
}

/// Maps a real vector to the permutation of its coordinate ranks.
///
/// `perm[j]` is the rank of `position[j]` in ascending order; equal values
/// rank by index.
pub fn decode_random_keys(position: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..position.len()).collect();
    order.sort_by(|&a, &b| position[a].total_cmp(&position[b]).then(a.cmp(&b)));
    let mut perm = vec![0; position.len()];
    for (rank, &j) in order.iter().enumerate() {
        perm[j] = rank;
    }
    perm
}

pub fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter().all(|&w| w < n && !std::mem::replace(&mut seen[w], true))
}

/// Total cost `Σ_j cost[j][perm[j]]`.
pub fn assignment_cost(m: &CostMatrix, perm: &[usize]) -> Result<f64> {
    if !is_permutation(perm, m.n()) {
        return Err(Error::InvalidPermutation(format!(
            "{perm:?} is not a permutation of 0..{}",
            m.n()
        )));
    }
    Ok(perm.iter().enumerate().map(|(j, &w)| m.cost(j, w)).sum())
}

/// Rearranges `perm` into its lexicographic successor; false at the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let k = perm.iter().rposition(|&v| v > perm[i]).expect("successor exists");
    perm.swap(i, k);
    perm[i + 1..].reverse();
    true
}

/// Exhaustive search over all `n!` assignments. Ties keep the
/// lexicographically smallest permutation.
pub fn brute_force_optimum(m: &CostMatrix) -> Result<Assignment> {
    let n = m.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = Assignment {
        total_cost: assignment_cost(m, &perm)?,
        perm: perm.clone(),
    };
    while next_permutation(&mut perm) {
        let cost: f64 = perm.iter().enumerate().map(|(j, &w)| m.cost(j, w)).sum();
        if cost < best.total_cost {
            best.total_cost = cost;
            best.perm.copy_from_slice(&perm);
        }
    }
    Ok(best)
}

/// Solves with the modified bat algorithm over random keys in [0, 1]^n.
///
/// The reported cost is recomputed from the decoded permutation.
pub fn solve_assignment_mba(m: &CostMatrix, cfg: &SwarmConfig) -> Result<(Assignment, RunResult)> {
    let n = m.n();
    let space = SearchSpace::uniform(n, 0.0, 1.0)?;
    let objective = |keys: &[f64]| -> f64 {
        decode_random_keys(keys)
            .iter()
            .enumerate()
            .map(|(j, &w)| m.cost(j, w))
            .sum()
    };
    let run = run_mba(&objective, &space, cfg)?;
    let perm = decode_random_keys(&run.best.best_position);
    let total_cost = assignment_cost(m, &perm)?;
    Ok((Assignment { perm, total_cost }, run))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn restaurant() -> CostMatrix {
        CostMatrix::new(vec![
            vec![216.0, 247.0, 541.0, 222.0],
            vec![437.0, 937.0, 849.0, 543.0],
            vec![82.0, 329.0, 325.0, 289.0],
            vec![578.0, 264.0, 776.0, 158.0],
        ])
        .unwrap()
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_random_keys(&[0.1, 0.2, 0.3]), vec![0, 1, 2]);
        assert_eq!(decode_random_keys(&[0.9, 0.1, 0.5]), vec![2, 0, 1]);
        assert_eq!(decode_random_keys(&[0.5, 0.5]), vec![0, 1]);
        assert_eq!(decode_random_keys(&[7.0]), vec![0]);
    }

    #[test]
    fn cost_examples() {
        let m = restaurant();
        // 247 + 437 + 325 + 158
        assert_eq!(assignment_cost(&m, &[1, 0, 2, 3]).unwrap(), 1167.0);
        // 541 + 937 + 289 + 578
        assert_eq!(assignment_cost(&m, &[2, 1, 3, 0]).unwrap(), 2345.0);
        let one = CostMatrix::new(vec![vec![42.0]]).unwrap();
        assert_eq!(assignment_cost(&one, &[0]).unwrap(), 42.0);
    }

    #[test]
    fn cost_rejects_invalid_permutation() {
        let m = restaurant();
        assert!(assignment_cost(&m, &[0, 0, 1, 2]).is_err());
        assert!(assignment_cost(&m, &[0, 1, 2]).is_err());
        assert!(assignment_cost(&m, &[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let best = brute_force_optimum(&restaurant()).unwrap();
        assert_eq!(best.perm, vec![1, 0, 2, 3]);
        assert_eq!(best.total_cost, 1167.0);

        let n = 5;
        let diag = CostMatrix::new(
            (0..n)
                .map(|j| (0..n).map(|w| if j == w { 0.0 } else { 1.0 }).collect())
                .collect(),
        )
        .unwrap();
        let best = brute_force_optimum(&diag).unwrap();
        assert_eq!(best.perm, vec![0, 1, 2, 3, 4]);
        assert_eq!(best.total_cost, 0.0);
    }

    #[test]
    fn brute_force_ties_keep_lexicographic_first() {
        let flat = CostMatrix::new(vec![vec![1.0; 3]; 3]).unwrap();
        assert_eq!(brute_force_optimum(&flat).unwrap().perm, vec![0, 1, 2]);
    }

    #[test]
    fn brute_force_refuses_large_n() {
        let big = CostMatrix::new(vec![vec![1.0; 11]; 11]).unwrap();
        assert!(matches!(
            brute_force_optimum(&big),
            Err(Error::SizeLimit { n: 11, limit: 10 })
        ));
    }

    #[test]
    fn next_permutation_visits_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn matrix_validation() {
        assert!(CostMatrix::new(vec![]).is_err());
        assert!(CostMatrix::new(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        let err = CostMatrix::new(vec![vec![1.0, 2.0], vec![3.0, -4.0]]).unwrap_err();
        assert!(err.to_string().contains("row 1, column 1"), "{err}");
    }

    #[test]
    fn csv_and_json_parsing() {
        let m = CostMatrix::from_csv_str("w1,w2\n1, 2\n3,4\n").unwrap();
        assert_eq!(m.rows(), &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let m = CostMatrix::from_csv_str("1,2\n3,4").unwrap();
        assert_eq!(m.n(), 2);
        let err = CostMatrix::from_csv_str("1,2\n3,x\n").unwrap_err();
        assert!(err.to_string().contains("row 1, column 1"), "{err}");
        assert!(CostMatrix::from_csv_str("1,2,3\n4,5,6\n").is_err());
        let m = CostMatrix::from_json_str(r#"{"costs": [[5, 1], [2, 8]]}"#).unwrap();
        assert_eq!(m.cost(0, 1), 1.0);
        assert!(CostMatrix::from_json_str(r#"{"costs": [[5, -1], [2, 8]]}"#).is_err());
    }

    #[test]
    fn solver_small_cases() {
        let cfg = SwarmConfig {
            max_iterations: 50,
            rng_seed: 3,
            ..SwarmConfig::default()
        };
        let one = CostMatrix::new(vec![vec![42.0]]).unwrap();
        let (a, _) = solve_assignment_mba(&one, &cfg).unwrap();
        assert_eq!((a.perm, a.total_cost), (vec![0], 42.0));

        let two = CostMatrix::new(vec![vec![1.0, 100.0], vec![100.0, 1.0]]).unwrap();
        let (a, run) = solve_assignment_mba(&two, &cfg).unwrap();
        assert_eq!((a.perm, a.total_cost), (vec![0, 1], 2.0));
        assert_eq!(run.best.best_fitness, 2.0);
    }
}
