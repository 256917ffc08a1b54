//! Command-line interface: compile tasks to their commit form, solve with
//! the internal or an external planner, translate plans between the two
//! tasks, attribute goal achievement, generate random instances, and run
//! benchmark suites.
//!
//! Exit codes: 0 success, 1 unsolvable, 2 limit reached, 3 input error,
//! 4 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commitplan::bench::{run_benchmark, BenchClock, BenchOptions, Engine};
use commitplan::compile::{compile, forecast_size, CompileOptions};
use commitplan::external::{external_solve, ExternalPlannerConfig};
use commitplan::jsonio::{
    achievement_report_json, mapping_result_json, read_any_task_json, read_compiled_json,
    read_task_json, write_compiled_json, write_task_json, LoadedTask,
};
use commitplan::pddl::{emit_pddl, ground, parse_pddl, EmitOptions, GroundingOptions};
use commitplan::planfile::{parse_plan_file, resolve_steps, write_plan_file};
use commitplan::planmap::{backward_map, forward_map, permanent_achievers};
use commitplan::search::{
    solve_greedy, solve_optimal, SearchLimits, SearchOutcome, SearchResult,
};
use commitplan::strips::{Plan, Task};
use commitplan::taskgen::{generate, GenParams};

const TIME_LIMIT_ENV: &str = "COMMITPLAN_TIME_LIMIT";

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(err: impl std::fmt::Display) -> Self {
        CliError::Input(err.to_string())
    }
}

type CliResult = Result<u8, CliError>;

#[derive(Parser)]
#[command(name = "commitplan", version, about = "Goal-commit compilation toolkit for STRIPS planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TaskInput {
    /// Task document (strips-task/1 or commit-task/1 JSON).
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["domain", "problem"])]
    input: Option<PathBuf>,
    /// PDDL domain file (with --problem).
    #[arg(long, requires = "problem")]
    domain: Option<PathBuf>,
    /// PDDL problem file (with --domain).
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,
    /// Prune delete-relaxation-unreachable actions while grounding.
    #[arg(long)]
    prune: bool,
    /// Cap on the number of ground actions.
    #[arg(long, default_value_t = 1_000_000)]
    max_ground_actions: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Pddl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Optimal,
    Greedy,
    External,
}

#[derive(Args)]
struct LimitArgs {
    /// Time limit in seconds (default from COMMITPLAN_TIME_LIMIT if set).
    #[arg(long)]
    time_limit: Option<f64>,
    /// Cap on stored states.
    #[arg(long)]
    max_states: Option<usize>,
    /// Cap on node expansions.
    #[arg(long)]
    max_expansions: Option<u64>,
}

impl LimitArgs {
    fn to_limits(&self) -> Result<SearchLimits, CliError> {
        let time = match self.time_limit {
            Some(s) => Some(s),
            None => match std::env::var(TIME_LIMIT_ENV) {
                Ok(text) => Some(text.parse::<f64>().map_err(|_| {
                    CliError::Input(format!(
                        "{TIME_LIMIT_ENV} must be a number of seconds, got `{text}`"
                    ))
                })?),
                Err(_) => None,
            },
        };
        Ok(SearchLimits {
            time: time.map(Duration::from_secs_f64),
            max_states: self.max_states,
            max_expansions: self.max_expansions,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a task into its goal-commit form.
    Compile {
        #[command(flatten)]
        task: TaskInput,
        /// Output path (JSON) or path prefix (PDDL).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        out_format: OutFormat,
        /// Provenance sidecar path (useful with --out-format pddl).
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Cap on pending goals added by one action (2^n variants).
        #[arg(long, default_value_t = 12)]
        max_subset_exponent: u32,
        /// Print the compiled size forecast and exit without compiling.
        #[arg(long)]
        forecast: bool,
    },
    /// Solve a task and optionally write the plan file.
    Solve {
        #[command(flatten)]
        task: TaskInput,
        #[arg(long, value_enum, default_value = "optimal")]
        engine: EngineKind,
        /// External planner command template with {domain} {problem}
        /// {plan_out} and optional {time_limit} placeholders.
        #[arg(long, required_if_eq("engine", "external"))]
        planner_cmd: Option<String>,
        #[command(flatten)]
        limits: LimitArgs,
        /// Write the plan in competition format to this path.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Translate a plan between a task and its compiled form.
    MapPlan {
        #[arg(long, value_enum)]
        direction: Direction,
        /// The original task document.
        #[arg(long)]
        task: PathBuf,
        /// The compiled task document (commit-task/1).
        #[arg(long)]
        compiled: PathBuf,
        /// Plan file to translate.
        #[arg(long)]
        plan: PathBuf,
        /// Write the mapping report JSON here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the mapped plan in competition format to this path.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Report which step permanently achieves each goal of a plan.
    Analyze {
        /// Task document the plan refers to.
        #[arg(long)]
        task: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Write the report JSON here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random task.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        min_fluents: usize,
        #[arg(long, default_value_t = 8)]
        max_fluents: usize,
        #[arg(long, default_value_t = 2)]
        min_actions: usize,
        #[arg(long, default_value_t = 8)]
        max_actions: usize,
        #[arg(long, default_value_t = 2)]
        max_pre: usize,
        #[arg(long, default_value_t = 2)]
        max_add: usize,
        #[arg(long, default_value_t = 2)]
        max_del: usize,
        #[arg(long, default_value_t = 0.25)]
        neg_pre_prob: f64,
        #[arg(long, default_value_t = 1)]
        min_goals: usize,
        #[arg(long, default_value_t = 3)]
        max_goals: usize,
        #[arg(long, default_value_t = 0.15)]
        goal_init_prob: f64,
        #[arg(long, default_value_t = 0)]
        min_cost: u32,
        #[arg(long, default_value_t = 3)]
        max_cost: u32,
        /// Write the task JSON here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite and append results to a CSV.
    Bench {
        /// Directory holding task JSON files and/or PDDL pairs.
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "optimal")]
        engine: EngineKind,
        #[arg(long, required_if_eq("engine", "external"))]
        planner_cmd: Option<String>,
        /// Solve both the original and the compiled variant.
        #[arg(long)]
        both_variants: bool,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, default_value_t = 900.0)]
        agl_horizon: f64,
        /// Worker threads (rows stay in task order).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Prune delete-relaxation-unreachable actions while grounding.
        #[arg(long)]
        prune: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Backward,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn emit_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl TaskInput {
    fn grounding_options(&self) -> GroundingOptions {
        GroundingOptions { prune_unreachable: self.prune, max_actions: self.max_ground_actions }
    }

    /// Loads a task; commit-task documents resolve to their inner task.
    fn load(&self) -> Result<Task, CliError> {
        match (&self.input, &self.domain, &self.problem) {
            (Some(path), None, None) => {
                let text = read_file(path)?;
                match read_any_task_json(&text).map_err(CliError::input)? {
                    LoadedTask::Plain(task) => Ok(task),
                    LoadedTask::Compiled(compiled) => Ok(compiled.task),
                }
            }
            (None, Some(domain), Some(problem)) => {
                let model =
                    parse_pddl(&read_file(domain)?, &read_file(problem)?).map_err(CliError::input)?;
                ground(&model, &self.grounding_options()).map_err(CliError::input)
            }
            _ => Err(CliError::Input(
                "provide either --in FILE or both --domain and --problem".into(),
            )),
        }
    }

    /// Loads a plain (uncompiled) task; rejects commit-task documents.
    fn load_plain(&self) -> Result<Task, CliError> {
        if let (Some(path), None, None) = (&self.input, &self.domain, &self.problem) {
            let text = read_file(path)?;
            return match read_any_task_json(&text).map_err(CliError::input)? {
                LoadedTask::Plain(task) => Ok(task),
                LoadedTask::Compiled(_) => {
                    Err(CliError::Input("input is already a commit-task document".into()))
                }
            };
        }
        self.load()
    }
}

fn run_solver(
    engine: EngineKind,
    planner_cmd: Option<&str>,
    task: &Task,
    limits: &SearchLimits,
) -> Result<SearchResult, CliError> {
    match engine {
        EngineKind::Optimal => Ok(solve_optimal(task, limits)),
        EngineKind::Greedy => Ok(solve_greedy(task, limits)),
        EngineKind::External => {
            let command = planner_cmd
                .ok_or_else(|| CliError::Input("--engine external requires --planner-cmd".into()))?;
            let config = ExternalPlannerConfig::new(command);
            external_solve(&config, task, limits).map_err(CliError::input)
        }
    }
}

fn cmd_compile(
    task: &TaskInput,
    out: Option<&Path>,
    out_format: OutFormat,
    sidecar: Option<&Path>,
    max_subset_exponent: u32,
    forecast: bool,
) -> CliResult {
    let base = task.load_plain()?;
    if forecast {
        let size = forecast_size(&base);
        println!(
            "compiled_action_count={} max_subset_exponent={}",
            size.compiled_action_count, size.max_subset_exponent
        );
        return Ok(0);
    }
    let options = CompileOptions { max_subset_exponent };
    let compiled = compile(&base, &options).map_err(CliError::input)?;

    match out_format {
        OutFormat::Json => {
            emit_output(out, &write_compiled_json(&compiled))?;
        }
        OutFormat::Pddl => {
            let prefix = out
                .ok_or_else(|| CliError::Input("--out-format pddl requires --out PREFIX".into()))?;
            let stem = prefix
                .file_name()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "compiled".into());
            let emission = emit_pddl(
                &compiled.task,
                &EmitOptions { domain_name: stem.clone(), problem_name: format!("{stem}-1") },
            )
            .map_err(CliError::input)?;
            let prefix_str = prefix.to_string_lossy();
            write_file(Path::new(&format!("{prefix_str}-domain.pddl")), &emission.domain)?;
            write_file(Path::new(&format!("{prefix_str}-problem.pddl")), &emission.problem)?;
        }
    }
    if let Some(sidecar) = sidecar {
        write_file(sidecar, &write_compiled_json(&compiled))?;
    }
    eprintln!(
        "compiled: {} fluents, {} actions, {} pending goals",
        compiled.task.num_fluents(),
        compiled.task.num_actions(),
        compiled.pending.len()
    );
    Ok(0)
}

fn cmd_solve(
    task_input: &TaskInput,
    engine: EngineKind,
    planner_cmd: Option<&str>,
    limits: &LimitArgs,
    plan_out: Option<&Path>,
) -> CliResult {
    let task = task_input.load()?;
    let limits = limits.to_limits()?;
    let result = run_solver(engine, planner_cmd, &task, &limits)?;
    match &result.outcome {
        SearchOutcome::Solved(plan) => {
            println!(
                "outcome=solved cost={} length={} expansions={} time_s={:.3}",
                plan.cost,
                plan.len(),
                result.stats.expansions,
                result.stats.wall.as_secs_f64()
            );
            let rendered = write_plan_file(&task, plan);
            match plan_out {
                Some(path) => write_file(path, &rendered)?,
                None => print!("{rendered}"),
            }
            Ok(0)
        }
        SearchOutcome::Unsolvable => {
            println!(
                "outcome=unsolvable expansions={} time_s={:.3}",
                result.stats.expansions,
                result.stats.wall.as_secs_f64()
            );
            Ok(1)
        }
        SearchOutcome::Limit(kind) => {
            println!(
                "outcome=limit limit={} expansions={} time_s={:.3}",
                kind.as_str(),
                result.stats.expansions,
                result.stats.wall.as_secs_f64()
            );
            Ok(2)
        }
    }
}

fn cmd_map_plan(
    direction: Direction,
    task_path: &Path,
    compiled_path: &Path,
    plan_path: &Path,
    out: Option<&Path>,
    plan_out: Option<&Path>,
) -> CliResult {
    let task = read_task_json(&read_file(task_path)?).map_err(CliError::input)?;
    let compiled = read_compiled_json(&read_file(compiled_path)?).map_err(CliError::input)?;
    let parsed = parse_plan_file(&read_file(plan_path)?).map_err(CliError::input)?;

    let (mapping, from_task, to_task) = match direction {
        Direction::Forward => {
            let steps = resolve_steps(&task, &parsed.steps).map_err(CliError::input)?;
            let plan = Plan::of(&task, steps);
            let mapping = forward_map(&task, &plan, &compiled).map_err(CliError::input)?;
            (mapping, &task, &compiled.task)
        }
        Direction::Backward => {
            let steps = resolve_steps(&compiled.task, &parsed.steps).map_err(CliError::input)?;
            let plan = Plan::of(&compiled.task, steps);
            let mapping = backward_map(&task, &compiled, &plan).map_err(CliError::input)?;
            (mapping, &compiled.task, &task)
        }
    };

    emit_output(out, &mapping_result_json(from_task, to_task, &mapping))?;
    if let Some(path) = plan_out {
        write_file(path, &write_plan_file(to_task, &mapping.plan))?;
    }
    Ok(0)
}

fn cmd_analyze(task_path: &Path, plan_path: &Path, out: Option<&Path>) -> CliResult {
    let task = read_task_json(&read_file(task_path)?).map_err(CliError::input)?;
    let parsed = parse_plan_file(&read_file(plan_path)?).map_err(CliError::input)?;
    let steps = resolve_steps(&task, &parsed.steps).map_err(CliError::input)?;
    let plan = Plan::of(&task, steps);
    let report = permanent_achievers(&task, &plan).map_err(CliError::input)?;
    emit_output(out, &achievement_report_json(&task, &report))?;
    Ok(0)
}

fn cmd_gen(params: GenParams, out: Option<&Path>) -> CliResult {
    params.validate().map_err(CliError::Input)?;
    let task = generate(&params);
    emit_output(out, &write_task_json(&task))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    suite: &Path,
    csv: &Path,
    engine: EngineKind,
    planner_cmd: Option<&str>,
    both_variants: bool,
    limits: &LimitArgs,
    agl_horizon: f64,
    jobs: usize,
    prune: bool,
) -> CliResult {
    let engine = match engine {
        EngineKind::Optimal => Engine::Optimal,
        EngineKind::Greedy => Engine::Greedy,
        EngineKind::External => {
            let command = planner_cmd
                .ok_or_else(|| CliError::Input("--engine external requires --planner-cmd".into()))?;
            Engine::External(ExternalPlannerConfig::new(command))
        }
    };
    let opts = BenchOptions {
        engine,
        both_variants,
        limits: limits.to_limits()?,
        agl_horizon_s: agl_horizon,
        jobs,
        clock: BenchClock::Wall,
        compile_options: CompileOptions::default(),
        grounding: GroundingOptions { prune_unreachable: prune, ..Default::default() },
    };
    let summary = run_benchmark(suite, &opts, csv).map_err(CliError::input)?;
    print!("{}", summary.render_table());
    Ok(0)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Compile { task, out, out_format, sidecar, max_subset_exponent, forecast } => {
            cmd_compile(
                &task,
                out.as_deref(),
                out_format,
                sidecar.as_deref(),
                max_subset_exponent,
                forecast,
            )
        }
        Command::Solve { task, engine, planner_cmd, limits, plan_out } => {
            cmd_solve(&task, engine, planner_cmd.as_deref(), &limits, plan_out.as_deref())
        }
        Command::MapPlan { direction, task, compiled, plan, out, plan_out } => {
            cmd_map_plan(direction, &task, &compiled, &plan, out.as_deref(), plan_out.as_deref())
        }
        Command::Analyze { task, plan, out } => cmd_analyze(&task, &plan, out.as_deref()),
        Command::Gen {
            seed,
            min_fluents,
            max_fluents,
            min_actions,
            max_actions,
            max_pre,
            max_add,
            max_del,
            neg_pre_prob,
            min_goals,
            max_goals,
            goal_init_prob,
            min_cost,
            max_cost,
            out,
        } => cmd_gen(
            GenParams {
                fluents: min_fluents..=max_fluents,
                actions: min_actions..=max_actions,
                max_pre,
                max_add,
                max_del,
                neg_pre_prob,
                goals: min_goals..=max_goals,
                goal_init_prob,
                costs: min_cost..=max_cost,
                seed,
            },
            out.as_deref(),
        ),
        Command::Bench {
            suite,
            csv,
            engine,
            planner_cmd,
            both_variants,
            limits,
            agl_horizon,
            jobs,
            prune,
        } => cmd_bench(
            &suite,
            &csv,
            engine,
            planner_cmd.as_deref(),
            both_variants,
            &limits,
            agl_horizon,
            jobs,
            prune,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
