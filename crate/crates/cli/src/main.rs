use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use batswarm::assignment::{brute_force_optimum, solve_assignment_mba, Assignment, CostMatrix, BRUTE_FORCE_LIMIT};
use batswarm::benchmarks::{registry, FunctionId};
use batswarm::experiment::{
    bench, bench_csv, compare, comparison_csv, to_json, write_atomic, Algorithm, ExperimentPlan, OutputFormat,
};
use batswarm::swarm::SwarmConfig;
use batswarm::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Bat algorithm (BA) and modified bat algorithm (MBA) experiments.
#[derive(Parser)]
#[command(name = "batswarm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or both algorithms on benchmark functions.
    Bench(BenchArgs),
    /// Seed-paired BA vs MBA comparison with rank-sum tests.
    Compare(CompareArgs),
    /// Solve a job-worker assignment matrix with the MBA.
    Assign(AssignArgs),
    /// Print the benchmark registry.
    ListFunctions,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Ba,
    Mba,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    /// Population 40; F5 at dim 16, F1 at 256, F3 and F10 at 128.
    Yang,
}

#[derive(Args)]
struct SwarmFlags {
    /// Iterations per run.
    #[arg(long)]
    iters: Option<usize>,
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Base seed; run k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// Loudness decay factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Pulse-rate growth factor.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    fmin: Option<f64>,
    #[arg(long)]
    fmax: Option<f64>,
    /// Initial loudness.
    #[arg(long)]
    a0: Option<f64>,
    /// Asymptotic pulse rate.
    #[arg(long)]
    r0: Option<f64>,
}

impl SwarmFlags {
    fn apply(&self, mut cfg: SwarmConfig) -> SwarmConfig {
        cfg.max_iterations = self.iters.unwrap_or(cfg.max_iterations);
        cfg.population_size = self.pop.unwrap_or(cfg.population_size);
        cfg.rng_seed = self.seed.unwrap_or(cfg.rng_seed);
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.gamma = self.gamma.unwrap_or(cfg.gamma);
        cfg.f_min = self.fmin.unwrap_or(cfg.f_min);
        cfg.f_max = self.fmax.unwrap_or(cfg.f_max);
        cfg.initial_loudness = self.a0.unwrap_or(cfg.initial_loudness);
        cfg.initial_pulse_rate = self.r0.unwrap_or(cfg.initial_pulse_rate);
        cfg
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct PlanFlags {
    /// Comma-separated ids such as F1,F7, or "all".
    #[arg(long = "fn", value_delimiter = ',', default_value = "all", conflicts_with = "preset")]
    functions: Vec<String>,
    /// Dimension for F1-F13 (rejected for fixed-dimension functions).
    #[arg(long, conflicts_with = "preset")]
    dim: Option<usize>,
    /// Independent runs per function.
    #[arg(long, default_value_t = batswarm::experiment::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[command(flatten)]
    swarm: SwarmFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "algo", value_enum, default_value = "both")]
    algorithm: AlgoArg,
    #[command(flatten)]
    plan: PlanFlags,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    plan: PlanFlags,
}

#[derive(Args)]
struct AssignArgs {
    /// Cost matrix as CSV, or JSON `{"costs": [[...]]}` when the name ends in .json.
    matrix: PathBuf,
    /// Also run the exhaustive search (n <= 10) and report whether the MBA matched it.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    swarm: SwarmFlags,
    #[command(flatten)]
    output: OutputFlags,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::NonFiniteObjective { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_functions(raw: &[String]) -> Result<Vec<FunctionId>, Error> {
    let mut ids = Vec::new();
    for item in raw {
        let item = item.trim();
        if item.eq_ignore_ascii_case("all") {
            ids.extend(FunctionId::ALL);
        } else {
            ids.push(item.parse()?);
        }
    }
    Ok(ids)
}

fn build_plan(algorithm: Algorithm, flags: &PlanFlags) -> Result<ExperimentPlan, Error> {
    let mut plan = match flags.preset {
        Some(PresetArg::Yang) => ExperimentPlan::yang_preset(algorithm),
        None => {
            let mut plan = ExperimentPlan::new(algorithm, &parse_functions(&flags.functions)?);
            plan.dim_override = flags.dim;
            plan
        }
    };
    plan.runs = flags.runs;
    plan.cfg = flags.swarm.apply(plan.cfg);
    plan.resolve()?;
    Ok(plan)
}

fn emit(output: &OutputFlags, contents: &str) -> Result<(), Error> {
    match &output.out {
        Some(path) => write_atomic(path, contents),
        None => Ok(std::io::stdout().write_all(contents.as_bytes())?),
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Error> {
    let algorithm = match args.algorithm {
        AlgoArg::Ba => Algorithm::Ba,
        AlgoArg::Mba => Algorithm::Mba,
        AlgoArg::Both => Algorithm::Both,
    };
    let plan = build_plan(algorithm, &args.plan)?;
    let report = bench(&plan)?;
    let text = match format_of(&args.plan.output) {
        OutputFormat::Csv => bench_csv(&report)?,
        OutputFormat::Json => to_json(&report)?,
    };
    emit(&args.plan.output, &text)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Error> {
    let plan = build_plan(Algorithm::Both, &args.plan)?;
    let report = compare(&plan)?;
    let text = match format_of(&args.plan.output) {
        OutputFormat::Csv => comparison_csv(&report)?,
        OutputFormat::Json => to_json(&report)?,
    };
    emit(&args.plan.output, &text)?;
    eprintln!(
        "MBA smaller mean on {}/{} functions, smaller std on {}/{}",
        report.mean_wins(),
        report.rows.len(),
        report.std_wins(),
        report.rows.len()
    );
    Ok(())
}

fn format_of(output: &OutputFlags) -> OutputFormat {
    match output.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    }
}

#[derive(Serialize)]
struct AssignReport {
    solution: Assignment,
    minutes: f64,
    evaluations: u64,
    oracle: Option<Assignment>,
    matched_oracle: Option<bool>,
}

fn cmd_assign(args: &AssignArgs) -> Result<(), Error> {
    let matrix = load_matrix(&args.matrix)?;
    let cfg = args.swarm.apply(SwarmConfig::default());
    if args.oracle && matrix.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            n: matrix.n(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let (solution, run) = solve_assignment_mba(&matrix, &cfg)?;
    let oracle = if args.oracle {
        Some(brute_force_optimum(&matrix)?)
    } else {
        None
    };
    let report = AssignReport {
        minutes: solution.total_cost / 60.0,
        matched_oracle: oracle.as_ref().map(|o| o.total_cost == solution.total_cost),
        evaluations: run.evaluations,
        solution,
        oracle,
    };
    let text = match format_of(&args.output) {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => assign_text(&report),
    };
    emit(&args.output, &text)
}

fn load_matrix(path: &Path) -> Result<CostMatrix, Error> {
    CostMatrix::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

/// Job/worker lines followed by `key,value` totals.
fn assign_text(report: &AssignReport) -> String {
    let mut out = String::from("job,worker\n");
    for (j, w) in report.solution.perm.iter().enumerate() {
        out.push_str(&format!("J{},W{}\n", j + 1, w + 1));
    }
    out.push_str(&format!("total_seconds,{}\n", report.solution.total_cost));
    out.push_str(&format!("total_minutes,{:.2}\n", report.minutes));
    out.push_str(&format!("evaluations,{}\n", report.evaluations));
    if let (Some(oracle), Some(matched)) = (&report.oracle, report.matched_oracle) {
        out.push_str(&format!("oracle_seconds,{}\n", oracle.total_cost));
        let pairs: Vec<String> = oracle
            .perm
            .iter()
            .enumerate()
            .map(|(j, w)| format!("J{}->W{}", j + 1, w + 1))
            .collect();
        out.push_str(&format!("oracle_assignment,{}\n", pairs.join(" ")));
        out.push_str(&format!("match,{matched}\n"));
    }
    out
}

fn cmd_list_functions() -> Result<(), Error> {
    let mut out = String::new();
    for spec in registry() {
        out.push_str(&format!(
            "{:<4} {:<28} {:<26} {}\n",
            spec.id, spec.name, spec.dim_policy, spec.bounds
        ));
    }
    Ok(std::io::stdout().write_all(out.as_bytes())?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Assign(args) => cmd_assign(args),
        Command::ListFunctions => cmd_list_functions(),
    };
    match result.map_err(Failure::from) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
