//! Python bindings: expose the task model, the goal-commit compilation,
//! the planners, and the plan mappings to Python.
//!
//! Plans cross the boundary as lists of action-name strings; analysis
//! reports cross as the same versioned JSON documents the CLI emits.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use commitplan::compile::{compile as compile_rs, CompileOptions};
use commitplan::jsonio;
use commitplan::metrics;
use commitplan::pddl;
use commitplan::planmap;
use commitplan::search;
use commitplan::strips::{self, Plan};
use commitplan::taskgen;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn runtime_err(err: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(err.to_string())
}

/// A ground STRIPS planning task.
#[pyclass(name = "Task", frozen, from_py_object)]
#[derive(Clone)]
struct PyTask {
    inner: strips::Task,
}

impl PyTask {
    fn plan_from_names(&self, steps: Vec<String>) -> PyResult<Plan> {
        let ids = commitplan::planfile::resolve_steps(&self.inner, &steps).map_err(value_err)?;
        Ok(Plan::of(&self.inner, ids))
    }
}

#[pymethods]
impl PyTask {
    /// Parse a `strips-task/1` JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTask { inner: jsonio::read_task_json(text).map_err(value_err)? })
    }

    /// Parse and ground a PDDL domain/problem pair.
    #[staticmethod]
    #[pyo3(signature = (domain_text, problem_text, prune=false, max_ground_actions=1_000_000))]
    fn from_pddl(
        domain_text: &str,
        problem_text: &str,
        prune: bool,
        max_ground_actions: u64,
    ) -> PyResult<Self> {
        let model = pddl::parse_pddl(domain_text, problem_text).map_err(value_err)?;
        let options =
            pddl::GroundingOptions { prune_unreachable: prune, max_actions: max_ground_actions };
        Ok(PyTask { inner: pddl::ground(&model, &options).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        jsonio::write_task_json(&self.inner)
    }

    /// Emit the task as grounded PDDL: `(domain_text, problem_text)`.
    fn to_pddl(&self) -> PyResult<(String, String)> {
        let emission =
            pddl::emit_pddl(&self.inner, &pddl::EmitOptions::default()).map_err(value_err)?;
        Ok((emission.domain, emission.problem))
    }

    #[getter]
    fn num_fluents(&self) -> usize {
        self.inner.num_fluents()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    #[getter]
    fn fluents(&self) -> Vec<String> {
        self.inner.fluents().iter().map(|f| f.name.clone()).collect()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions().iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn init(&self) -> Vec<String> {
        self.inner.set_names(self.inner.init())
    }

    #[getter]
    fn goal(&self) -> Vec<String> {
        self.inner.set_names(self.inner.goal())
    }

    /// Invariant violations, empty for a valid task.
    fn violations(&self) -> Vec<String> {
        strips::validate_task(&self.inner).violations.iter().map(|v| v.to_string()).collect()
    }

    /// Check a plan given as action names. Returns `(valid, cost, detail)`.
    fn validate_plan(&self, steps: Vec<String>) -> PyResult<(bool, u64, String)> {
        let plan = self.plan_from_names(steps)?;
        let check = strips::validate_plan(&self.inner, &plan.steps);
        let cost = match &check {
            strips::PlanCheck::Valid { cost, .. } => *cost,
            _ => plan.cost,
        };
        Ok((check.is_valid(), cost, check.describe()))
    }

    /// Achievement report (`achievement-report/1` JSON) for a valid plan.
    fn analyze(&self, steps: Vec<String>) -> PyResult<String> {
        let plan = self.plan_from_names(steps)?;
        let report = planmap::permanent_achievers(&self.inner, &plan).map_err(value_err)?;
        Ok(jsonio::achievement_report_json(&self.inner, &report))
    }

    fn __repr__(&self) -> String {
        format!(
            "Task(fluents={}, actions={}, goals={})",
            self.inner.num_fluents(),
            self.inner.num_actions(),
            self.inner.goal().len()
        )
    }
}

/// A compiled commit planning task with its provenance.
#[pyclass(name = "CompiledTask", frozen)]
struct PyCompiledTask {
    inner: commitplan::CompiledTask,
}

#[pymethods]
impl PyCompiledTask {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCompiledTask { inner: jsonio::read_compiled_json(text).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        jsonio::write_compiled_json(&self.inner)
    }

    /// The compiled task itself, as a Task.
    #[getter]
    fn task(&self) -> PyTask {
        PyTask { inner: self.inner.task.clone() }
    }

    #[getter]
    fn pending_goals(&self) -> Vec<String> {
        self.inner.task.set_names(&self.inner.pending)
    }

    /// Pending goal name -> commit fluent name.
    #[getter]
    fn commit_fluents(&self) -> std::collections::BTreeMap<String, String> {
        self.inner
            .commit_map
            .iter()
            .map(|(g, c)| {
                (self.inner.task.fluent_name(g).to_string(), self.inner.task.fluent_name(c).to_string())
            })
            .collect()
    }

    /// Per compiled action: `(name, base_name, variant, committed_goals)`.
    fn provenance(&self) -> Vec<(String, String, String, Vec<String>)> {
        self.inner
            .task
            .actions()
            .iter()
            .zip(&self.inner.provenance)
            .map(|(action, prov)| {
                (
                    action.name.clone(),
                    prov.base_name.clone(),
                    prov.variant.as_str().to_string(),
                    self.inner.task.set_names(&prov.committed),
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "CompiledTask(actions={}, pending_goals={})",
            self.inner.task.num_actions(),
            self.inner.pending.len()
        )
    }
}

/// Solver outcome.
#[pyclass(name = "SolveResult", frozen)]
struct PySolveResult {
    #[pyo3(get)]
    outcome: String,
    #[pyo3(get)]
    plan: Option<Vec<String>>,
    #[pyo3(get)]
    cost: Option<u64>,
    #[pyo3(get)]
    expansions: u64,
    #[pyo3(get)]
    wall_s: f64,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!("SolveResult(outcome={:?}, cost={:?})", self.outcome, self.cost)
    }
}

fn limits_from(
    time_limit: Option<f64>,
    max_states: Option<usize>,
    max_expansions: Option<u64>,
) -> search::SearchLimits {
    search::SearchLimits {
        time: time_limit.map(std::time::Duration::from_secs_f64),
        max_states,
        max_expansions,
    }
}

/// Solve a task with the built-in engines: `optimal` (A*, admissible
/// heuristic), `blind` (uniform cost), or `greedy` (no optimality claim).
#[pyfunction]
#[pyo3(signature = (task, engine="optimal", time_limit=None, max_states=None, max_expansions=None))]
fn solve(
    task: &PyTask,
    engine: &str,
    time_limit: Option<f64>,
    max_states: Option<usize>,
    max_expansions: Option<u64>,
) -> PyResult<PySolveResult> {
    let limits = limits_from(time_limit, max_states, max_expansions);
    let result = match engine {
        "optimal" => search::solve_optimal(&task.inner, &limits),
        "blind" => {
            search::solve_optimal_with(&task.inner, &limits, search::OptimalHeuristic::Blind)
        }
        "greedy" => search::solve_greedy(&task.inner, &limits),
        other => return Err(value_err(format!("unknown engine `{other}`"))),
    };
    let (outcome, plan) = match result.outcome {
        search::SearchOutcome::Solved(plan) => {
            let names = plan.names(&task.inner).iter().map(|s| s.to_string()).collect();
            ("solved".to_string(), Some((plan.cost, names)))
        }
        search::SearchOutcome::Unsolvable => ("unsolvable".to_string(), None),
        search::SearchOutcome::Limit(kind) => (format!("limit-{}", kind.as_str()), None),
    };
    Ok(PySolveResult {
        outcome,
        cost: plan.as_ref().map(|(c, _)| *c),
        plan: plan.map(|(_, names)| names),
        expansions: result.stats.expansions,
        wall_s: result.stats.wall.as_secs_f64(),
    })
}

/// Compile a task into its goal-commit form.
#[pyfunction]
#[pyo3(signature = (task, max_subset_exponent=12))]
fn compile(task: &PyTask, max_subset_exponent: u32) -> PyResult<PyCompiledTask> {
    let options = CompileOptions { max_subset_exponent };
    Ok(PyCompiledTask { inner: compile_rs(&task.inner, &options).map_err(value_err)? })
}

/// Closed-form compiled size: `(action_count, max_subset_exponent)`.
#[pyfunction]
fn forecast_size(task: &PyTask) -> (u64, u32) {
    let f = commitplan::compile::forecast_size(&task.inner);
    (f.compiled_action_count, f.max_subset_exponent)
}

/// Goal fluents that are false initially and addable by some action.
#[pyfunction]
fn pending_goals(task: &PyTask) -> Vec<String> {
    let pending = commitplan::compile::pending_goals(&task.inner);
    task.inner.set_names(&pending)
}

/// Rewrite a valid base plan into a compiled plan committing each goal at
/// its permanent achiever. Returns `(mapped_plan, mapping_json)`.
#[pyfunction]
fn forward_map(
    task: &PyTask,
    plan: Vec<String>,
    compiled: &PyCompiledTask,
) -> PyResult<(Vec<String>, String)> {
    let plan = task.plan_from_names(plan)?;
    let mapping = planmap::forward_map(&task.inner, &plan, &compiled.inner).map_err(value_err)?;
    let names = mapping.plan.names(&compiled.inner.task).iter().map(|s| s.to_string()).collect();
    let json = jsonio::mapping_result_json(&task.inner, &compiled.inner.task, &mapping);
    Ok((names, json))
}

/// Replace each compiled action by its base action via provenance.
/// Returns `(mapped_plan, mapping_json)`.
#[pyfunction]
fn backward_map(
    task: &PyTask,
    compiled: &PyCompiledTask,
    plan: Vec<String>,
) -> PyResult<(Vec<String>, String)> {
    let ids = commitplan::planfile::resolve_steps(&compiled.inner.task, &plan).map_err(value_err)?;
    let plan = Plan::of(&compiled.inner.task, ids);
    let mapping =
        planmap::backward_map(&task.inner, &compiled.inner, &plan).map_err(value_err)?;
    let names = mapping.plan.names(&task.inner).iter().map(|s| s.to_string()).collect();
    let json = jsonio::mapping_result_json(&compiled.inner.task, &task.inner, &mapping);
    Ok((names, json))
}

/// For each pending goal, the plan position that committed it.
#[pyfunction]
fn commit_achievers(
    compiled: &PyCompiledTask,
    plan: Vec<String>,
) -> PyResult<std::collections::BTreeMap<String, usize>> {
    let ids = commitplan::planfile::resolve_steps(&compiled.inner.task, &plan).map_err(value_err)?;
    let plan = Plan::of(&compiled.inner.task, ids);
    let points = planmap::commit_achievers(&compiled.inner, &plan).map_err(runtime_err)?;
    Ok(points
        .into_iter()
        .map(|(goal, at)| (compiled.inner.task.fluent_name(goal).to_string(), at))
        .collect())
}

/// Generate a small random task, deterministic in the seed.
#[pyfunction]
#[pyo3(signature = (seed, min_fluents=3, max_fluents=8, min_actions=2, max_actions=8,
                    max_pre=2, max_add=2, max_del=2, neg_pre_prob=0.25,
                    min_goals=1, max_goals=3, goal_init_prob=0.15, min_cost=0, max_cost=3))]
#[allow(clippy::too_many_arguments)]
fn generate_task(
    seed: u64,
    min_fluents: usize,
    max_fluents: usize,
    min_actions: usize,
    max_actions: usize,
    max_pre: usize,
    max_add: usize,
    max_del: usize,
    neg_pre_prob: f64,
    min_goals: usize,
    max_goals: usize,
    goal_init_prob: f64,
    min_cost: u32,
    max_cost: u32,
) -> PyResult<PyTask> {
    let params = taskgen::GenParams {
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
    };
    params.validate().map_err(value_err)?;
    Ok(PyTask { inner: taskgen::generate(&params) })
}

/// Cost-quality score `best/achieved` (0 when unsolved).
#[pyfunction]
#[pyo3(signature = (best_known, achieved=None))]
fn sat_score(best_known: u64, achieved: Option<u64>) -> PyResult<f64> {
    metrics::sat_score(best_known, achieved).map_err(value_err)
}

/// Time score `1 - log(t)/log(horizon)`, clamped to [0, 1].
#[pyfunction]
#[pyo3(signature = (runtime_s, horizon_s=900.0))]
fn agl_score(runtime_s: f64, horizon_s: f64) -> f64 {
    metrics::agl_score(runtime_s, horizon_s)
}

#[pymodule]
fn commitplan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTask>()?;
    m.add_class::<PyCompiledTask>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(forecast_size, m)?)?;
    m.add_function(wrap_pyfunction!(pending_goals, m)?)?;
    m.add_function(wrap_pyfunction!(forward_map, m)?)?;
    m.add_function(wrap_pyfunction!(backward_map, m)?)?;
    m.add_function(wrap_pyfunction!(commit_achievers, m)?)?;
    m.add_function(wrap_pyfunction!(generate_task, m)?)?;
    m.add_function(wrap_pyfunction!(sat_score, m)?)?;
    m.add_function(wrap_pyfunction!(agl_score, m)?)?;
    Ok(())
}
