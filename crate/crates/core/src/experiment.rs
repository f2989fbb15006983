//! Seeded multi-run experiments, BA-versus-MBA comparisons and their reports.
//!
//! Run `k` of every function and algorithm uses seed `cfg.rng_seed + k`, so
//! the two algorithms start from identical populations and comparisons are
//! paired by seed.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{Benchmark, FunctionId};
use crate::error::{Error, Result};
use crate::stats::{rank_sum_test, summarize, RankSumReport, SampleSummary, SIGNIFICANCE_LEVEL};
use crate::swarm::{run, SwarmConfig, Variant};

/// Number of independent runs per function when none is given.
pub const DEFAULT_RUNS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ba,
    Mba,
    Both,
}

impl Algorithm {
    pub fn variants(self) -> &'static [Variant] {
        match self {
            Algorithm::Ba => &[Variant::Ba],
            Algorithm::Mba => &[Variant::Mba],
            Algorithm::Both => &[Variant::Ba, Variant::Mba],
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Algorithm::Ba),
            "mba" => Ok(Algorithm::Mba),
            "both" => Ok(Algorithm::Both),
            _ => Err(Error::InvalidConfig(format!(
                "unknown algorithm {s:?} (expected ba, mba or both)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format {s:?} (expected csv or json)"
            ))),
        }
    }
}

/// A function to run, optionally at its own dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub id: FunctionId,
    pub dim: Option<usize>,
}

impl From<FunctionId> for Target {
    fn from(id: FunctionId) -> Self {
        Self { id, dim: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub algorithm: Algorithm,
    pub targets: Vec<Target>,
    pub runs: usize,
    /// Dimension for every target that does not carry its own.
    pub dim_override: Option<usize>,
    pub cfg: SwarmConfig,
}

impl ExperimentPlan {
    /// Plan with the default protocol. Repeated ids are kept once.
    pub fn new(algorithm: Algorithm, functions: &[FunctionId]) -> Self {
        let mut targets: Vec<Target> = Vec::with_capacity(functions.len());
        for &id in functions {
            if !targets.iter().any(|t| t.id == id) {
                targets.push(id.into());
            }
        }
        Self {
            algorithm,
            targets,
            runs: DEFAULT_RUNS,
            dim_override: None,
            cfg: SwarmConfig::default(),
        }
    }

    /// Population 40 with the larger dimensions used by Yang's original study:
    /// F5 at 16, F1 at 256, F3 and F10 at 128.
    pub fn yang_preset(algorithm: Algorithm) -> Self {
        let targets = [
            (FunctionId::F5, 16),
            (FunctionId::F1, 256),
            (FunctionId::F3, 128),
            (FunctionId::F10, 128),
        ]
        .into_iter()
        .map(|(id, dim)| Target { id, dim: Some(dim) })
        .collect();
        Self {
            algorithm,
            targets,
            runs: DEFAULT_RUNS,
            dim_override: None,
            cfg: SwarmConfig {
                population_size: 40,
                ..SwarmConfig::default()
            },
        }
    }

    /// Checks the plan and binds every target to its dimension.
    pub fn resolve(&self) -> Result<Vec<Benchmark>> {
        self.cfg.validate()?;
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::InvalidConfig("no functions selected".into()));
        }
        self.targets
            .iter()
            .map(|t| Benchmark::with_override(t.id, t.dim.or(self.dim_override)))
            .collect()
    }

    pub fn seed_of_run(&self, k: usize) -> u64 {
        self.cfg.rng_seed.wrapping_add(k as u64)
    }
}

/// Outcome of one seeded run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub function: FunctionId,
    pub dim: usize,
    pub algorithm: Variant,
    pub run: usize,
    pub seed: u64,
    pub initial_best: f64,
    pub final_best: f64,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: FunctionId,
    pub dim: usize,
    pub algorithm: Variant,
    pub summary: SampleSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub runs: Vec<RunRecord>,
    /// Empty when fewer than two runs were made.
    pub summaries: Vec<SummaryRow>,
}

/// Executes every run of the plan. Runs are independent and may execute in
/// parallel; the returned order is function, algorithm, run.
pub fn execute(plan: &ExperimentPlan) -> Result<Vec<RunRecord>> {
    let benchmarks = plan.resolve()?;
    let jobs: Vec<(Benchmark, Variant, usize)> = benchmarks
        .iter()
        .flat_map(|b| {
            plan.algorithm
                .variants()
                .iter()
                .flat_map(move |&v| (0..plan.runs).map(move |k| (*b, v, k)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(bench, variant, k)| {
            let seed = plan.seed_of_run(k);
            let cfg = plan.cfg.clone().with_seed(seed);
            let result = run(&bench, &bench.search_space(), &cfg, variant)?;
            Ok(RunRecord {
                function: bench.id(),
                dim: bench.dim(),
                algorithm: variant,
                run: k,
                seed,
                initial_best: result.initial_best_fitness,
                final_best: result.best.best_fitness,
                evaluations: result.evaluations,
            })
        })
        .collect()
}

fn finals<'a>(records: &'a [RunRecord], id: FunctionId, dim: usize, v: Variant) -> impl Iterator<Item = f64> + 'a {
    records
        .iter()
        .filter(move |r| r.function == id && r.dim == dim && r.algorithm == v)
        .map(|r| r.final_best)
}

pub fn bench(plan: &ExperimentPlan) -> Result<BenchReport> {
    let runs = execute(plan)?;
    let mut summaries = Vec::new();
    if plan.runs >= 2 {
        for b in plan.resolve()? {
            for &v in plan.algorithm.variants() {
                let sample: Vec<f64> = finals(&runs, b.id(), b.dim(), v).collect();
                summaries.push(SummaryRow {
                    function: b.id(),
                    dim: b.dim(),
                    algorithm: v,
                    summary: summarize(&sample)?,
                });
            }
        }
    }
    Ok(BenchReport { runs, summaries })
}

/// Which algorithm has the strictly smaller statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    /// MBA smaller.
    #[serde(rename = "+")]
    Mba,
    /// BA smaller.
    #[serde(rename = "-")]
    Ba,
    #[serde(rename = "=")]
    Tie,
}

impl Winner {
    pub fn of(ba: f64, mba: f64) -> Self {
        if mba < ba {
            Winner::Mba
        } else if ba < mba {
            Winner::Ba
        } else {
            Winner::Tie
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Winner::Mba => "+",
            Winner::Ba => "-",
            Winner::Tie => "=",
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub function: FunctionId,
    pub dim: usize,
    pub ba: SampleSummary,
    pub mba: SampleSummary,
    pub min_avg: Winner,
    pub min_std: Winner,
    pub rank_sum: RankSumReport,
    pub significant: bool,
}

impl ComparisonRow {
    pub fn new(function: FunctionId, dim: usize, ba: &[f64], mba: &[f64]) -> Result<Self> {
        let ba_summary = summarize(ba)?;
        let mba_summary = summarize(mba)?;
        let rank_sum = rank_sum_test(ba, mba)?;
        Ok(Self {
            function,
            dim,
            min_avg: Winner::of(ba_summary.mean, mba_summary.mean),
            min_std: Winner::of(ba_summary.std_dev, mba_summary.std_dev),
            significant: !rank_sum.degenerate && rank_sum.p_value < SIGNIFICANCE_LEVEL,
            ba: ba_summary,
            mba: mba_summary,
            rank_sum,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub runs: Vec<RunRecord>,
}

impl ComparisonReport {
    pub fn mean_wins(&self) -> usize {
        self.rows.iter().filter(|r| r.min_avg == Winner::Mba).count()
    }

    pub fn std_wins(&self) -> usize {
        self.rows.iter().filter(|r| r.min_std == Winner::Mba).count()
    }
}

/// Seed-paired BA-versus-MBA comparison. The plan's algorithm is ignored.
pub fn compare(plan: &ExperimentPlan) -> Result<ComparisonReport> {
    if plan.runs < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: plan.runs,
        });
    }
    let plan = ExperimentPlan {
        algorithm: Algorithm::Both,
        ..plan.clone()
    };
    let runs = execute(&plan)?;
    let rows = plan
        .resolve()?
        .iter()
        .map(|b| {
            let ba: Vec<f64> = finals(&runs, b.id(), b.dim(), Variant::Ba).collect();
            let mba: Vec<f64> = finals(&runs, b.id(), b.dim(), Variant::Mba).collect();
            ComparisonRow::new(b.id(), b.dim(), &ba, &mba)
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonReport { rows, runs })
}

/// Scientific notation with a four-digit mantissa, e.g. `3.406E+00`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.3E}");
    let (mantissa, exp) = s.split_once('E').expect("E notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Column order of [`bench_csv`].
pub const BENCH_COLUMNS: [&str; 8] = [
    "function",
    "dim",
    "algorithm",
    "run",
    "seed",
    "initial_best",
    "final_best",
    "evaluations",
];

/// Column order of [`comparison_csv`].
pub const COMPARISON_COLUMNS: [&str; 13] = [
    "function",
    "dim",
    "ba_mean",
    "ba_std",
    "mba_mean",
    "mba_std",
    "min_avg",
    "min_std",
    "u_statistic",
    "z_score",
    "p_value",
    "method",
    "significant",
];

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per run, then `mean`, `std`, `min` and `max` rows per function
/// and algorithm (their `run` column holds the statistic name, `seed` and
/// `initial_best` are empty and `evaluations` holds the run count).
pub fn bench_csv(report: &BenchReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(BENCH_COLUMNS)?;
        for r in &report.runs {
            w.write_record([
                r.function.to_string(),
                r.dim.to_string(),
                r.algorithm.to_string(),
                r.run.to_string(),
                r.seed.to_string(),
                format_sci(r.initial_best),
                format_sci(r.final_best),
                r.evaluations.to_string(),
            ])?;
        }
        for s in &report.summaries {
            let stats = [
                ("mean", s.summary.mean),
                ("std", s.summary.std_dev),
                ("min", s.summary.min),
                ("max", s.summary.max),
            ];
            for (name, value) in stats {
                w.write_record([
                    s.function.to_string(),
                    s.dim.to_string(),
                    s.algorithm.to_string(),
                    name.to_string(),
                    String::new(),
                    String::new(),
                    format_sci(value),
                    s.summary.n.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn comparison_csv(report: &ComparisonReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(COMPARISON_COLUMNS)?;
        for r in &report.rows {
            let method = serde_json::to_value(r.rank_sum.method)?;
            w.write_record([
                r.function.to_string(),
                r.dim.to_string(),
                format_sci(r.ba.mean),
                format_sci(r.ba.std_dev),
                format_sci(r.mba.mean),
                format_sci(r.mba.std_dev),
                r.min_avg.to_string(),
                r.min_std.to_string(),
                format_sci(r.rank_sum.u_statistic),
                format_sci(r.rank_sum.z_score),
                format_sci(r.rank_sum.p_value),
                method.as_str().unwrap_or_default().to_string(),
                r.significant.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| {
        Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "output path has no file name",
        ))
    })?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(algorithm: Algorithm, ids: &[FunctionId]) -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(algorithm, ids);
        plan.runs = 3;
        plan.dim_override = Some(5);
        plan.cfg.population_size = 8;
        plan.cfg.max_iterations = 20;
        plan.cfg.rng_seed = 11;
        plan
    }

    #[test]
    fn sci_format_matches_table_style() {
        assert_eq!(format_sci(3.406), "3.406E+00");
        assert_eq!(format_sci(15.1), "1.510E+01");
        assert_eq!(format_sci(0.000123456), "1.235E-04");
        assert_eq!(format_sci(-116.0), "-1.160E+02");
        assert_eq!(format_sci(0.0), "0.000E+00");
        assert_eq!(format_sci(1.0e120), "1.000E+120");
    }

    #[test]
    fn winner_symbols() {
        assert_eq!(Winner::of(2.0, 1.0), Winner::Mba);
        assert_eq!(Winner::of(1.0, 2.0), Winner::Ba);
        assert_eq!(Winner::of(1.0, 1.0), Winner::Tie);
        assert_eq!(serde_json::to_string(&Winner::Mba).unwrap(), "\"+\"");
    }

    #[test]
    fn fixed_dimension_override_rejected() {
        let mut plan = quick(Algorithm::Ba, &[FunctionId::F14]);
        plan.dim_override = Some(10);
        let err = plan.resolve().unwrap_err();
        assert_eq!(err.to_string(), "F14 has fixed dimension 2");
    }

    #[test]
    fn repeated_functions_are_planned_once() {
        let plan = ExperimentPlan::new(Algorithm::Ba, &[FunctionId::F3, FunctionId::F1, FunctionId::F3]);
        assert_eq!(plan.targets, vec![FunctionId::F3.into(), FunctionId::F1.into()]);
    }

    #[test]
    fn yang_preset_dimensions() {
        let plan = ExperimentPlan::yang_preset(Algorithm::Both);
        let dims: Vec<(FunctionId, usize)> = plan.resolve().unwrap().iter().map(|b| (b.id(), b.dim())).collect();
        assert_eq!(
            dims,
            vec![
                (FunctionId::F5, 16),
                (FunctionId::F1, 256),
                (FunctionId::F3, 128),
                (FunctionId::F10, 128)
            ]
        );
        assert_eq!(plan.cfg.population_size, 40);
    }

    #[test]
    fn bench_rows_and_summaries() {
        let report = bench(&quick(Algorithm::Mba, &[FunctionId::F1, FunctionId::F2])).unwrap();
        assert_eq!(report.runs.len(), 6);
        assert_eq!(report.summaries.len(), 2);
        assert_eq!(report.runs[1].seed, 12);
        let csv = bench_csv(&report).unwrap();
        assert_eq!(csv.lines().count(), 1 + 6 + 8);
        assert!(csv.starts_with("function,dim,algorithm,run,seed,initial_best,final_best,evaluations\n"));
    }

    #[test]
    fn compare_is_seed_paired() {
        let report = compare(&quick(Algorithm::Both, &[FunctionId::F1])).unwrap();
        let (ba, mba): (Vec<_>, Vec<_>) = report.runs.iter().partition(|r| r.algorithm == Variant::Ba);
        for (a, b) in ba.iter().zip(&mba) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.initial_best, b.initial_best);
        }
        assert_eq!(report.rows.len(), 1);
    }

    #[test]
    fn compare_needs_two_runs() {
        let mut plan = quick(Algorithm::Both, &[FunctionId::F1]);
        plan.runs = 1;
        assert!(matches!(compare(&plan), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn json_round_trip_is_identity() {
        let report = compare(&quick(Algorithm::Both, &[FunctionId::F7])).unwrap();
        let json = to_json(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back).unwrap(), json);
    }
}
