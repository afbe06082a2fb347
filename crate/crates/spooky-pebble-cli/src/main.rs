//! Command-line interface for the spooky pebble game solver: single-instance
//! solving, the Pareto-front sweep, strategy validation, exact oracles, and
//! DAG generation.
//!
//! Machine-readable output is line-delimited JSON on stdout (one point per
//! line); progress and diagnostics go to stderr.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spooky_pebble::dag::{diamond_gadget, line_graph, parse_dag, random_dag, Dag};
use spooky_pebble::game::{validate, Semantics, SequentialStrategy};
use spooky_pebble::optimize::{optimize_fixpoint, sequentialize};
use spooky_pebble::oracle::{min_pebbles, min_time};
use spooky_pebble::solve::{solve_spooky, SolveLimits, SolveStatus};

#[derive(Parser)]
#[command(name = "spooky-pebble", version, about = "Spooky pebble game solver toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and write the best strategy found.
    Solve(SolveArgs),
    /// Sweep ghost and pebble budgets, emitting every solution as a point.
    Pareto(ParetoArgs),
    /// Replay a strategy file against a DAG and report its costs.
    Validate(ValidateArgs),
    /// Exact minimal costs by brute force (small DAGs only).
    Oracle(OracleArgs),
    /// Generate DAGs in the edge-list format.
    Gen(GenArgs),
}

#[derive(Args)]
struct LimitArgs {
    /// Budget for a single solver call, in seconds.
    #[arg(long, default_value_t = 15.0, env = "SPOOKY_T_WAIT")]
    t_wait: f64,
    /// Total solve budget, in seconds.
    #[arg(long, default_value_t = 120.0, env = "SPOOKY_T_MAX")]
    t_max: f64,
    /// Horizon increment after a solver-call timeout.
    #[arg(long, default_value_t = 5, env = "SPOOKY_T_SKIP")]
    t_skip: usize,
    /// Preset for large instances: t_wait=60s, t_max=480s.
    #[arg(long)]
    large: bool,
    /// Base seed for solver and optimizer randomization.
    #[arg(long, default_value_t = 0, env = "SPOOKY_SEED")]
    seed: u64,
    /// Hard cap on the unrolled horizon.
    #[arg(long)]
    max_horizon: Option<usize>,
}

impl LimitArgs {
    fn to_limits(&self, seed: u64) -> SolveLimits {
        let (t_wait, t_max) = if self.large {
            (60.0, 480.0)
        } else {
            (self.t_wait, self.t_max)
        };
        SolveLimits {
            t_wait: Duration::from_secs_f64(t_wait),
            t_max: Duration::from_secs_f64(t_max),
            t_skip: self.t_skip.max(1),
            seed,
            max_horizon: self.max_horizon,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// DAG file in edge-list format.
    dag: PathBuf,
    /// Pebble budget.
    #[arg(short, long)]
    pebbles: usize,
    /// Ghost budget.
    #[arg(short = 's', long, default_value_t = 0)]
    ghosts: usize,
    #[command(flatten)]
    limits: LimitArgs,
    /// Skip the post-optimization passes.
    #[arg(long)]
    no_optimize: bool,
    /// Seed-permuted optimizer runs per solution.
    #[arg(long, default_value_t = 5)]
    optimizer_runs: usize,
    /// Write the best strategy to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    /// DAG file in edge-list format.
    dag: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
    /// Solver runs per (pebbles, ghosts) pair.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    repeats: u32,
    /// Seed-permuted optimizer runs per solution.
    #[arg(long, default_value_t = 5)]
    optimizer_runs: usize,
    /// Also write the points as CSV to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum SemanticsArg {
    Irreversible,
    Reversible,
    Spooky,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Irreversible => Semantics::Irreversible,
            SemanticsArg::Reversible => Semantics::Reversible,
            SemanticsArg::Spooky => Semantics::Spooky,
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// DAG file in edge-list format.
    dag: PathBuf,
    /// Strategy file, one move per line.
    strategy: PathBuf,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Spooky)]
    semantics: SemanticsArg,
    /// Accept strategies that do not end at (roots, {}).
    #[arg(long)]
    partial: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// DAG file in edge-list format.
    dag: PathBuf,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Spooky)]
    semantics: SemanticsArg,
    /// Ghost budget (spooky only).
    #[arg(short = 's', long, default_value_t = 0)]
    ghosts: usize,
    /// Also report the minimal move count under this pebble budget.
    #[arg(short, long)]
    pebbles: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    /// Write the edge list to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Path v1 -> v2 -> ... -> vn.
    Line { n: usize },
    /// The p-by-p grid whose minimal irreversible cost is p+1.
    Diamond { p: usize },
    /// Seeded random DAG with the given edge density in (0, 1].
    Random {
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// One solution in the machine-readable output stream.
#[derive(Serialize)]
struct ParetoPoint {
    pebbles: usize,
    ghosts: usize,
    time: usize,
    provenance: &'static str,
    seed: u64,
    wall_time: f64,
}

fn emit(point: &ParetoPoint, csv: &mut Option<fs::File>) {
    println!("{}", serde_json::to_string(point).unwrap());
    if let Some(file) = csv {
        writeln!(
            file,
            "{},{},{},{},{},{}",
            point.pebbles, point.ghosts, point.time, point.provenance, point.seed, point.wall_time
        )
        .expect("csv write failed");
    }
}

fn load_dag(path: &PathBuf) -> Result<Dag, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_dag(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Solves once and returns the sequentialized strategy with its point.
fn solve_once(
    dag: &Dag,
    pebbles: usize,
    ghosts: usize,
    limits: &SolveLimits,
) -> Result<Option<(SequentialStrategy, ParetoPoint)>, String> {
    let started = Instant::now();
    let outcome = solve_spooky(dag, pebbles, ghosts, limits);
    if outcome.status != SolveStatus::Solved {
        return Ok(None);
    }
    let trace = outcome.trace.expect("solved outcome carries a trace");
    let strat = sequentialize(dag, &trace, pebbles, ghosts).map_err(|e| e.to_string())?;
    let report = validate(dag, &strat, Semantics::Spooky, true).map_err(|e| e.to_string())?;
    let point = ParetoPoint {
        pebbles: report.pebbles,
        ghosts: report.ghosts,
        time: report.time,
        provenance: "raw-sat",
        seed: limits.seed,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok(Some((strat, point)))
}

/// Runs the optimizer `runs` times with different orders, emitting each
/// result, and returns the best (pebbles, ghosts, time) strategy seen.
fn optimize_solution(
    dag: &Dag,
    strat: &SequentialStrategy,
    pebble_budget: usize,
    base_seed: u64,
    runs: usize,
    csv: &mut Option<fs::File>,
) -> SequentialStrategy {
    let mut best = strat.clone();
    let mut best_key = {
        let r = validate(dag, strat, Semantics::Spooky, true).unwrap();
        (r.pebbles, r.ghosts, r.time)
    };
    for run in 0..runs {
        let started = Instant::now();
        let seed = base_seed.wrapping_add(run as u64);
        let tuned = optimize_fixpoint(dag, strat, pebble_budget, seed);
        let report = validate(dag, &tuned, Semantics::Spooky, true).unwrap();
        emit(
            &ParetoPoint {
                pebbles: report.pebbles,
                ghosts: report.ghosts,
                time: report.time,
                provenance: "optimized",
                seed,
                wall_time: started.elapsed().as_secs_f64(),
            },
            csv,
        );
        let key = (report.pebbles, report.ghosts, report.time);
        if key < best_key {
            best_key = key;
            best = tuned;
        }
    }
    best
}

fn cmd_solve(args: &SolveArgs) -> Result<(), String> {
    let dag = load_dag(&args.dag)?;
    let limits = args.limits.to_limits(args.limits.seed);
    let Some((strat, point)) = solve_once(&dag, args.pebbles, args.ghosts, &limits)? else {
        return Err(format!(
            "budget exhausted: no solution with {} pebbles and {} ghosts",
            args.pebbles, args.ghosts
        ));
    };
    emit(&point, &mut None);
    let best = if args.no_optimize {
        strat
    } else {
        optimize_solution(
            &dag,
            &strat,
            args.pebbles,
            args.limits.seed,
            args.optimizer_runs,
            &mut None,
        )
    };
    let text = best.to_text(&dag);
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write strategy: {e}"))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Ghost budgets of the sweep: |V| and its fifth, tenth and twentieth
/// (rounded up), then 0, deduplicated.
fn ghost_budgets(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = vec![n, n.div_ceil(5), n.div_ceil(10), n.div_ceil(20), 0];
    out.dedup();
    out
}

fn cmd_pareto(args: &ParetoArgs) -> Result<(), String> {
    let dag = load_dag(&args.dag)?;
    let n = dag.n_vertices();
    let mut csv = match &args.csv {
        Some(path) => {
            let mut file =
                fs::File::create(path).map_err(|e| format!("cannot create csv: {e}"))?;
            writeln!(file, "pebbles,ghosts,time,provenance,seed,wall_time")
                .map_err(|e| e.to_string())?;
            Some(file)
        }
        None => None,
    };
    let mut run_counter = 0u64;
    for ghosts in ghost_budgets(n) {
        // First find the baseline with unlimited pebbles.
        let mut best_pebbles: Option<usize> = None;
        for _ in 0..args.repeats {
            let limits = args.limits.to_limits(args.limits.seed.wrapping_add(run_counter));
            run_counter += 1;
            match solve_once(&dag, n, ghosts, &limits) {
                Ok(Some((strat, point))) => {
                    emit(&point, &mut csv);
                    let tuned = optimize_solution(
                        &dag,
                        &strat,
                        n,
                        limits.seed,
                        args.optimizer_runs,
                        &mut csv,
                    );
                    let report = validate(&dag, &tuned, Semantics::Spooky, true).unwrap();
                    let best = best_pebbles.get_or_insert(report.pebbles);
                    *best = (*best).min(report.pebbles);
                }
                Ok(None) => {}
                Err(e) => eprintln!("S={ghosts}: {e}"),
            }
        }
        let Some(baseline) = best_pebbles else {
            eprintln!("S={ghosts}: no solution with unlimited pebbles, moving on");
            continue;
        };
        // Then walk the pebble budget down in steps of five.
        let mut pebbles = baseline as i64;
        while pebbles >= 1 {
            let mut any_solved = false;
            for _ in 0..args.repeats {
                let limits = args.limits.to_limits(args.limits.seed.wrapping_add(run_counter));
                run_counter += 1;
                match solve_once(&dag, pebbles as usize, ghosts, &limits) {
                    Ok(Some((strat, point))) => {
                        any_solved = true;
                        emit(&point, &mut csv);
                        optimize_solution(
                            &dag,
                            &strat,
                            pebbles as usize,
                            limits.seed,
                            args.optimizer_runs,
                            &mut csv,
                        );
                    }
                    Ok(None) => {}
                    Err(e) => eprintln!("P={pebbles} S={ghosts}: {e}"),
                }
            }
            if !any_solved {
                break;
            }
            pebbles -= 5;
        }
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), String> {
    let dag = load_dag(&args.dag)?;
    let text = fs::read_to_string(&args.strategy)
        .map_err(|e| format!("cannot read {}: {e}", args.strategy.display()))?;
    let strat = SequentialStrategy::from_text(&dag, &text).map_err(|e| e.to_string())?;
    let report = validate(&dag, &strat, args.semantics.into(), !args.partial)
        .map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string(&report).unwrap());
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), String> {
    let dag = load_dag(&args.dag)?;
    let semantics: Semantics = args.semantics.into();
    let pebbles = min_pebbles(&dag, semantics, args.ghosts).map_err(|e| e.to_string())?;
    let time = match args.pebbles {
        Some(p) => Some(min_time(&dag, semantics, p, args.ghosts).map_err(|e| e.to_string())?),
        None => None,
    };
    let mut out = serde_json::json!({ "min_pebbles": pebbles });
    if let Some(t) = time {
        out["min_time"] = serde_json::json!(t);
    }
    println!("{out}");
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), String> {
    let dag = match args.kind {
        GenKind::Line { n } => line_graph(n),
        GenKind::Diamond { p } => diamond_gadget(p),
        GenKind::Random { n, density, seed } => random_dag(n, density, seed),
    }
    .map_err(|e| e.to_string())?;
    let text = dag.to_edge_list();
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write: {e}"))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Pareto(args) => cmd_pareto(args),
        Cmd::Validate(args) => cmd_validate(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
