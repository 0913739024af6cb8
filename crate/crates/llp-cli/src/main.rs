//! Command-line front end for the `llp` solvers.
//!
//! `solve` reads a JSON instance, runs the selected schedule, and prints a
//! JSON result with the solved table, the optimum, a reconstructed
//! witness, and work statistics. `check-linearity` exhaustively tests a
//! built-in predicate over a small finite lattice. `bench` repeats a solve
//! and reports wall time without asserting anything.
//!
//! Exit codes: 0 success, 1 internal error, 2 infeasible instance,
//! 3 validation or input error, 4 verification mismatch, 5 predicate
//! counterexample found.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use llp::checker::{self, CheckOutcome, FiniteLattice};
use llp::engine::{self, Mode, Outcome, ScheduleConfig, SolveReport, Value};
use llp::instance::{InstanceError, Problem, ProblemInstance};
use llp::knapsack::{self, KnapsackInstance};
use llp::lis;
use llp::obst::{self, ChainTree, ObstError, PairMap, TreeNode};
use llp::oracle;
use serde::Serialize;
use serde_json::json;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_COUNTEREXAMPLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "llp",
    version,
    about = "Least-fixpoint solvers for classic dynamic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a JSON instance and print a JSON result.
    Solve(SolveArgs),
    /// Exhaustively check a built-in predicate for lattice-linearity.
    CheckLinearity(CheckArgs),
    /// Repeat a solve and report wall time and rounds; asserts nothing.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Path to a JSON instance file.
    instance: PathBuf,

    #[command(flatten)]
    schedule: ScheduleArgs,

    /// Compare the result against the brute-force oracle.
    #[arg(long)]
    verify: bool,

    /// Include the advance trace in the output.
    #[arg(long)]
    trace: bool,

    /// Write the JSON result to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Schedule to run.
    #[arg(long, value_enum, default_value_t = CliMode::Seq)]
    mode: CliMode,

    /// Worker threads for the parallel schedules.
    #[arg(long, default_value_t = 4)]
    workers: usize,

    /// Seed for the asynchronous schedule's stale-read sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// How many published versions behind an asynchronous read may be.
    #[arg(long, default_value_t = 0)]
    staleness: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Built-in predicate name.
    name: String,

    /// Per-coordinate maxima of the finite lattice, e.g. `1 1` for the
    /// four vectors of {0,1}^2.
    #[arg(required = true)]
    dims: Vec<Value>,
}

#[derive(Args)]
struct BenchArgs {
    /// Path to a JSON instance file.
    instance: PathBuf,

    #[command(flatten)]
    schedule: ScheduleArgs,

    /// How many timed runs to perform.
    #[arg(long, default_value_t = 5)]
    repeat: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliMode {
    Seq,
    Rounds,
    Priority,
    Async,
}

impl From<CliMode> for Mode {
    fn from(mode: CliMode) -> Mode {
        match mode {
            CliMode::Seq => Mode::Sequential,
            CliMode::Rounds => Mode::Rounds,
            CliMode::Priority => Mode::Priority,
            CliMode::Async => Mode::AsyncStale,
        }
    }
}

/// A failure that already knows its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::CheckLinearity(args) => run_check(&args),
        Command::Bench(args) => run_bench(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn schedule_config(args: &ScheduleArgs, trace: bool) -> Result<ScheduleConfig, Failure> {
    if args.workers == 0 {
        return Err(Failure::new(
            EXIT_VALIDATION,
            "--workers must be at least 1",
        ));
    }
    let mut config = ScheduleConfig::with_mode(args.mode.into());
    config.workers = args.workers;
    config.seed = args.seed;
    config.staleness_bound = args.staleness;
    config.trace = trace;
    Ok(config)
}

/// Parse and validate an instance file, mapping failures to exit codes:
/// malformed JSON and invalid instances are validation errors, while
/// constraints that no solution can satisfy are infeasibility.
fn load_instance(path: &Path) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::new(
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    let parsed: ProblemInstance = serde_json::from_str(&text).map_err(|e| {
        Failure::new(
            EXIT_VALIDATION,
            format!("invalid instance {}: {e}", path.display()),
        )
    })?;
    parsed.build().map_err(|e| match e {
        InstanceError::Obst(ObstError::InfeasibleConstraints { .. }) => {
            Failure::new(EXIT_INFEASIBLE, format!("infeasible: {e}"))
        }
        other => Failure::new(EXIT_VALIDATION, format!("invalid instance: {other}")),
    })
}

fn solve_problem(problem: &Problem, config: &ScheduleConfig) -> Result<SolveReport, Failure> {
    let engine_failure =
        |e: engine::EngineError| Failure::new(EXIT_INTERNAL, format!("engine error: {e}"));
    match problem {
        Problem::Lis(instance) => {
            engine::solve(&lis::lis_spec(instance), config).map_err(engine_failure)
        }
        Problem::Obst(instance) => {
            engine::solve(&obst::obst_spec(instance), config).map_err(engine_failure)
        }
        Problem::Chain(instance) => {
            engine::solve(&obst::matrix_chain_spec(instance), config).map_err(engine_failure)
        }
        Problem::Knapsack(instance) => {
            knapsack::solve_knapsack(instance, config).map_err(|e| match e {
                knapsack::KnapsackError::UnsupportedSchedule { .. } => {
                    Failure::new(EXIT_VALIDATION, e.to_string())
                }
                knapsack::KnapsackError::Engine(inner) => engine_failure(inner),
                other => Failure::new(EXIT_VALIDATION, other.to_string()),
            })
        }
    }
}

#[derive(Serialize)]
struct TraceOut {
    round: u64,
    index: usize,
    old: Value,
    new: Value,
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(rename = "G")]
    g: serde_json::Value,
    optimum: Value,
    witness: serde_json::Value,
    rounds: u64,
    advances: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceOut>>,
}

/// Rows of an upper-triangular range table: row `i` holds the cells
/// `(i, i) ..= (i, n-1)`.
fn triangle_rows(g: &[Value], n: usize) -> serde_json::Value {
    let map = PairMap::new(n);
    let rows: Vec<Vec<Value>> = (0..n)
        .map(|i| (i..n).map(|j| g[map.flat(i, j)]).collect())
        .collect();
    json!(rows)
}

fn tree_json(node: &TreeNode) -> serde_json::Value {
    json!({
        "key": node.key,
        "left": node.left.as_deref().map(tree_json),
        "right": node.right.as_deref().map(tree_json),
    })
}

fn chain_json(tree: &ChainTree) -> serde_json::Value {
    match tree {
        ChainTree::Leaf(t) => json!({ "matrix": t }),
        ChainTree::Node(l, r) => json!({
            "left": chain_json(l),
            "right": chain_json(r),
        }),
    }
}

/// Table shape, optimum, and witness for the solved problem.
fn present(problem: &Problem, g: &[Value]) -> (serde_json::Value, Value, serde_json::Value) {
    match problem {
        Problem::Lis(instance) => {
            let optimum = *g.iter().max().expect("instances are nonempty");
            let witness = lis::reconstruct_lis(instance, g);
            (json!(g), optimum, json!(witness))
        }
        Problem::Obst(instance) => {
            let n = instance.key_count();
            let optimum = g[PairMap::new(n).flat(0, n - 1)];
            let witness = tree_json(&obst::reconstruct_tree(instance, g));
            (triangle_rows(g, n), optimum, witness)
        }
        Problem::Chain(instance) => {
            let n = instance.matrix_count();
            let optimum = g[PairMap::new(n).flat(0, n - 1)];
            let witness = chain_json(&obst::reconstruct_chain(instance, g));
            (triangle_rows(g, n), optimum, witness)
        }
        Problem::Knapsack(instance) => {
            let rows: Vec<&[Value]> = g.chunks(instance.columns()).collect();
            let optimum = *g.last().expect("instances are nonempty");
            let witness = knapsack::reconstruct_items(instance, g);
            (json!(rows), optimum, json!(witness))
        }
    }
}

/// Compare the solved table against the brute-force oracle. Exact
/// equality everywhere, except that an implication knapsack is held to
/// its documented contract instead: never above the oracle, and the
/// reported packing must be valid and worth the reported optimum.
fn verify(problem: &Problem, g: &[Value]) -> Result<(), Failure> {
    let too_large = |what: &str| {
        Failure::new(
            EXIT_VALIDATION,
            format!("instance too large to verify: {what}"),
        )
    };
    let mismatch = |detail: String| Failure::new(EXIT_MISMATCH, detail);
    match problem {
        Problem::Lis(instance) => {
            if instance.len() > oracle::MAX_ORACLE_SEQUENCE {
                return Err(too_large("sequences are capped at 20 positions"));
            }
            let reference = oracle::oracle_lis(instance);
            if reference.lengths != g {
                return Err(mismatch(format!(
                    "oracle lengths {:?} != solver {:?}",
                    reference.lengths, g
                )));
            }
        }
        Problem::Obst(instance) => {
            if instance.key_count() > oracle::MAX_ORACLE_RANGES {
                return Err(too_large("key ranges are capped at 10 keys"));
            }
            let reference = oracle::oracle_obst(instance);
            if reference.costs != g {
                return Err(mismatch(format!(
                    "oracle costs {:?} != solver {:?}",
                    reference.costs, g
                )));
            }
        }
        Problem::Chain(instance) => {
            if instance.matrix_count() > oracle::MAX_ORACLE_RANGES {
                return Err(too_large("chains are capped at 10 matrices"));
            }
            let reference = oracle::oracle_chain(instance);
            if reference.costs != g {
                return Err(mismatch(format!(
                    "oracle costs {:?} != solver {:?}",
                    reference.costs, g
                )));
            }
        }
        Problem::Knapsack(instance) => {
            if instance.item_count() > oracle::MAX_ORACLE_ITEMS {
                return Err(too_large("item sets are capped at 20 items"));
            }
            let reference = oracle::oracle_knapsack(instance);
            if instance.implications().is_empty() {
                if reference.grid != g {
                    return Err(mismatch(format!(
                        "oracle grid {:?} != solver {:?}",
                        reference.grid, g
                    )));
                }
            } else {
                verify_implication_knapsack(instance, g, &reference)?;
            }
        }
    }
    Ok(())
}

/// The implication solver records one witness per cell and may settle
/// below the unrestricted optimum on ties, so verification checks the
/// contract rather than equality.
fn verify_implication_knapsack(
    instance: &KnapsackInstance,
    g: &[Value],
    reference: &oracle::KnapsackOracle,
) -> Result<(), Failure> {
    for (cell, (&solved, &bound)) in g.iter().zip(&reference.grid).enumerate() {
        if solved > bound {
            return Err(Failure::new(
                EXIT_MISMATCH,
                format!("cell {cell}: solver {solved} exceeds oracle bound {bound}"),
            ));
        }
    }
    let items = knapsack::reconstruct_items(instance, g);
    let weight: Value = items.iter().map(|&t| instance.weights()[t - 1]).sum();
    let value: Value = items.iter().map(|&t| instance.values()[t - 1]).sum();
    let optimum = *g.last().unwrap();
    if weight > instance.capacity() || value != optimum {
        return Err(Failure::new(
            EXIT_MISMATCH,
            format!(
                "witness {items:?} (weight {weight}, value {value}) does not \
                 support the reported optimum {optimum}"
            ),
        ));
    }
    for &(a, b) in instance.implications() {
        if items.contains(&(a + 1)) && !items.contains(&(b + 1)) {
            return Err(Failure::new(
                EXIT_MISMATCH,
                format!(
                    "witness {items:?} breaks implication {} => {}",
                    a + 1,
                    b + 1
                ),
            ));
        }
    }
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let problem = load_instance(&args.instance)?;
    let config = schedule_config(&args.schedule, args.trace)?;
    let report = solve_problem(&problem, &config)?;
    let g = match &report.outcome {
        Outcome::Feasible(values) => values.as_slice(),
        Outcome::Infeasible { info, .. } => {
            return Err(Failure::new(
                EXIT_INFEASIBLE,
                format!(
                    "infeasible: index {} needs {} but is bounded by {}",
                    info.index, info.needed, info.top
                ),
            ));
        }
    };

    let verified = if args.verify {
        verify(&problem, g)?;
        Some(true)
    } else {
        None
    };

    let (g_json, optimum, witness) = present(&problem, g);
    let output = SolveOutput {
        g: g_json,
        optimum,
        witness,
        rounds: report.rounds,
        advances: report.total_advances,
        verified,
        trace: report.trace.as_ref().map(|events| {
            events
                .iter()
                .map(|e| TraceOut {
                    round: e.round,
                    index: e.index,
                    old: e.old,
                    new: e.new,
                })
                .collect()
        }),
    };
    // Compact JSON: one line per solve, grids stay greppable and pipeable.
    let mut rendered = serde_json::to_string(&output)
        .map_err(|e| Failure::new(EXIT_INTERNAL, format!("cannot render output: {e}")))?;
    rendered.push('\n');
    match &args.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            Failure::new(
                EXIT_VALIDATION,
                format!("cannot write {}: {e}", path.display()),
            )
        })?,
        None => print!("{rendered}"),
    }
    Ok(0)
}

fn run_check(args: &CheckArgs) -> Result<u8, Failure> {
    let builtin = checker::builtin(&args.name).ok_or_else(|| {
        Failure::new(
            EXIT_VALIDATION,
            format!(
                "unknown predicate {:?}; built-ins: {}",
                args.name,
                checker::BUILTIN_NAMES.join(", ")
            ),
        )
    })?;
    if let Some(arity) = builtin.arity {
        if args.dims.len() != arity {
            return Err(Failure::new(
                EXIT_VALIDATION,
                format!(
                    "{} expects {arity} coordinates ({}), got {}",
                    builtin.name,
                    builtin.coordinates,
                    args.dims.len()
                ),
            ));
        }
    }
    let lattice = FiniteLattice::new(args.dims.clone())
        .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
    match checker::check_lattice_linear(&lattice, &builtin.predicate) {
        CheckOutcome::LatticeLinear => {
            println!("ok");
            Ok(0)
        }
        CheckOutcome::Counterexample(found) => {
            let state = found
                .state
                .iter()
                .map(Value::to_string)
                .collect::<Vec<_>>()
                .join(", ");
            println!("counterexample: ({state})");
            eprintln!(
                "the predicate fails at ({state}) yet no index is forbidden, \
                 so it is not lattice-linear; coordinates: {}",
                builtin.coordinates
            );
            Ok(EXIT_COUNTEREXAMPLE)
        }
    }
}

fn run_bench(args: &BenchArgs) -> Result<u8, Failure> {
    if args.repeat == 0 {
        return Err(Failure::new(EXIT_VALIDATION, "--repeat must be at least 1"));
    }
    let problem = load_instance(&args.instance)?;
    let config = schedule_config(&args.schedule, false)?;
    println!(
        "mode={:?} workers={} staleness={} repeat={}",
        config.mode, config.workers, config.staleness_bound, args.repeat
    );
    let mut best = f64::INFINITY;
    let mut total = 0.0;
    for run in 1..=args.repeat {
        let start = Instant::now();
        let report = solve_problem(&problem, &config)?;
        let millis = start.elapsed().as_secs_f64() * 1e3;
        best = best.min(millis);
        total += millis;
        let mut line = String::new();
        let _ = write!(
            line,
            "run {run}: {millis:.3} ms, rounds={}, advances={}",
            report.rounds, report.total_advances
        );
        if let Outcome::Infeasible { .. } = report.outcome {
            line.push_str(" (infeasible)");
        }
        println!("{line}");
    }
    println!(
        "best {best:.3} ms, mean {:.3} ms over {} runs",
        total / args.repeat as f64,
        args.repeat
    );
    Ok(0)
}
