//! Driving external planners over emitted PDDL.
//!
//! The task is written to a scratch directory, the configured command runs
//! with `{domain}`, `{problem}`, `{plan_out}`, and `{time_limit}`
//! substituted, and the produced plan file is parsed, mapped back through
//! the emission's naming context, and re-validated against the in-memory
//! task before anything is reported as solved. External cost claims are
//! cross-checked, never trusted.

use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::pddl::{emit_pddl, EmitOptions, PddlError};
use crate::planfile::{parse_plan_file, PlanFileError};
use crate::search::{LimitKind, SearchLimits, SearchOutcome, SearchResult, SearchStats};
use crate::strips::{validate_plan, Plan, PlanCheck, Task};

#[derive(Clone, Debug)]
pub struct ExternalPlannerConfig {
    /// Command template; must contain `{domain}`, `{problem}`, and
    /// `{plan_out}`. `{time_limit}` (whole seconds) is optional.
    pub command: String,
    /// Exit codes treated as a normal planner exit (default `[0]`).
    pub expected_exit_codes: Vec<i32>,
    /// Where the plan lands, as a pattern over `{plan_out}`; lets wrappers
    /// that number their plan files (e.g. `{plan_out}.1`) be consumed.
    pub plan_file_pattern: String,
}

impl ExternalPlannerConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalPlannerConfig {
            command: command.into(),
            expected_exit_codes: vec![0],
            plan_file_pattern: "{plan_out}".into(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        for placeholder in ["{domain}", "{problem}", "{plan_out}"] {
            if !self.command.contains(placeholder) {
                return Err(HarnessError::BadConfig(format!(
                    "command template is missing `{placeholder}`"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("bad planner configuration: {0}")]
    BadConfig(String),
    #[error("failed to emit task: {0}")]
    Emit(#[from] PddlError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("planner exited with unexpected status {status}; stderr: {stderr}")]
    PlannerExit { status: i32, stderr: String },
    #[error("planner produced no plan file at {0}")]
    MissingPlanFile(PathBuf),
    #[error("plan file: {0}")]
    PlanParse(#[from] PlanFileError),
    #[error("external plan failed validation: {0}")]
    PlanValidation(String),
    #[error("declared cost {declared} does not match recomputed cost {recomputed}")]
    DeclaredCostMismatch { declared: u64, recomputed: u64 },
    #[error("csv: {0}")]
    Csv(String),
}

fn split_command(rendered: &str) -> Result<(String, Vec<String>), HarnessError> {
    let mut parts = rendered.split_whitespace().map(str::to_string);
    let program = parts
        .next()
        .ok_or_else(|| HarnessError::BadConfig("empty command template".into()))?;
    Ok((program, parts.collect()))
}

/// Waits for the child, killing its whole process group once the
/// deadline passes (planners routinely spawn helper processes). Returns
/// `None` on timeout.
fn wait_with_timeout(
    child: &mut std::process::Child,
    limit: Option<Duration>,
) -> std::io::Result<Option<std::process::ExitStatus>> {
    let started = Instant::now();
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if let Some(limit) = limit {
            if started.elapsed() >= limit {
                // The child was spawned as a process group leader.
                unsafe {
                    libc::kill(-(child.id() as i32), libc::SIGKILL);
                }
                child.kill().ok();
                child.wait()?;
                return Ok(None);
            }
        }
        std::thread::sleep(Duration::from_millis(10));
    }
}

/// Runs an external planner on the task and re-validates its plan.
pub fn external_solve(
    config: &ExternalPlannerConfig,
    task: &Task,
    limits: &SearchLimits,
) -> Result<SearchResult, HarnessError> {
    config.validate()?;
    let scratch = tempfile::tempdir()?;
    external_solve_in(config, task, limits, scratch.path())
}

fn external_solve_in(
    config: &ExternalPlannerConfig,
    task: &Task,
    limits: &SearchLimits,
    dir: &Path,
) -> Result<SearchResult, HarnessError> {
    let emission = emit_pddl(task, &EmitOptions::default())?;
    let domain_path = dir.join("domain.pddl");
    let problem_path = dir.join("problem.pddl");
    let plan_out = dir.join("plan.out");
    std::fs::write(&domain_path, &emission.domain)?;
    std::fs::write(&problem_path, &emission.problem)?;

    let time_limit_s = limits.time.map(|t| t.as_secs().max(1)).unwrap_or(0);
    let rendered = config
        .command
        .replace("{domain}", &domain_path.to_string_lossy())
        .replace("{problem}", &problem_path.to_string_lossy())
        .replace("{plan_out}", &plan_out.to_string_lossy())
        .replace("{time_limit}", &time_limit_s.to_string());
    let (program, args) = split_command(&rendered)?;

    let start = Instant::now();
    let mut child = Command::new(&program)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()?;
    // Drain stderr concurrently so a chatty planner cannot block on a
    // full pipe while we poll for exit.
    let stderr_pipe = child.stderr.take();
    let stderr_reader = std::thread::spawn(move || {
        let mut buf = String::new();
        if let Some(mut pipe) = stderr_pipe {
            use std::io::Read;
            pipe.read_to_string(&mut buf).ok();
        }
        buf
    });
    let status = wait_with_timeout(&mut child, limits.time)?;
    let wall = start.elapsed();
    let stderr = stderr_reader.join().unwrap_or_default();

    let stats = SearchStats { expansions: 0, generations: 0, wall, peak_states: 0 };

    let Some(status) = status else {
        return Ok(SearchResult { outcome: SearchOutcome::Limit(LimitKind::Time), stats });
    };

    let code = status.code().unwrap_or(-1);
    if !config.expected_exit_codes.contains(&code) {
        return Err(HarnessError::PlannerExit { status: code, stderr: stderr.trim().to_string() });
    }

    let plan_path = PathBuf::from(
        config.plan_file_pattern.replace("{plan_out}", &plan_out.to_string_lossy()),
    );
    if !plan_path.exists() {
        return Err(HarnessError::MissingPlanFile(plan_path));
    }
    let text = std::fs::read_to_string(&plan_path)?;
    let parsed = parse_plan_file(&text)?;

    // Plan steps name emitted identifiers; map them back before lookup.
    let mut steps = Vec::with_capacity(parsed.steps.len());
    for name in &parsed.steps {
        let original = emission.naming.original_action(name).unwrap_or(name.as_str());
        let id = task
            .action_id(original)
            .ok_or_else(|| PlanFileError::UnknownAction { name: name.clone() })?;
        steps.push(id);
    }

    match validate_plan(task, &steps) {
        PlanCheck::Valid { cost, .. } => {
            if let Some(declared) = parsed.declared_cost {
                if declared != cost {
                    return Err(HarnessError::DeclaredCostMismatch { declared, recomputed: cost });
                }
            }
            let plan = Plan { steps, cost };
            Ok(SearchResult { outcome: SearchOutcome::Solved(plan), stats })
        }
        other => Err(HarnessError::PlanValidation(other.describe())),
    }
}
