//! JSON exchange formats: tasks, compiled tasks, and analysis reports.
//!
//! Documents are versioned through a mandatory `format` header field and
//! reject unknown keys. All cross-references are by name; referential
//! errors carry a JSON-style path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitset::FluentSet;
use crate::compile::{CommitFluentMap, CompiledAction, CompiledTask, Variant};
use crate::planmap::{Achiever, AchievementReport, MappingResult};
use crate::strips::{validate_task, Action, ActionId, Fluent, FluentId, Task};

pub const TASK_FORMAT: &str = "strips-task/1";
pub const COMPILED_FORMAT: &str = "commit-task/1";
pub const ACHIEVEMENT_FORMAT: &str = "achievement-report/1";
pub const MAPPING_FORMAT: &str = "plan-mapping/1";

#[derive(Clone, Debug, thiserror::Error)]
pub enum JsonError {
    #[error("json syntax: {0}")]
    Syntax(String),
    #[error("unsupported document format `{found}`, expected `{expected}`")]
    Format { expected: &'static str, found: String },
    #[error("{path}: unknown {kind} `{name}`")]
    UnknownName { path: String, kind: &'static str, name: String },
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}

fn default_cost() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDoc {
    name: String,
    #[serde(default)]
    pre_pos: Vec<String>,
    #[serde(default)]
    pre_neg: Vec<String>,
    #[serde(default)]
    add: Vec<String>,
    #[serde(default)]
    del: Vec<String>,
    #[serde(default = "default_cost")]
    cost: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    format: String,
    fluents: Vec<String>,
    actions: Vec<ActionDoc>,
    #[serde(default)]
    init: Vec<String>,
    #[serde(default)]
    goal: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskBody {
    fluents: Vec<String>,
    actions: Vec<ActionDoc>,
    #[serde(default)]
    init: Vec<String>,
    #[serde(default)]
    goal: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceDoc {
    base_id: u32,
    base: String,
    variant: String,
    #[serde(default)]
    committed: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompiledDoc {
    format: String,
    task: TaskBody,
    pending_goals: Vec<String>,
    /// Pending goal name → commit fluent name.
    commit_fluents: BTreeMap<String, String>,
    provenance: Vec<ProvenanceDoc>,
}

struct NameResolver<'a> {
    index: std::collections::HashMap<&'a str, FluentId>,
}

impl<'a> NameResolver<'a> {
    fn new(fluents: &'a [String]) -> Self {
        let index = fluents
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), FluentId::new(i)))
            .collect();
        NameResolver { index }
    }

    fn set(&self, names: &[String], path: impl Fn(usize) -> String) -> Result<FluentSet, JsonError> {
        let mut out = FluentSet::new();
        for (i, name) in names.iter().enumerate() {
            match self.index.get(name.as_str()) {
                Some(&id) => {
                    out.insert(id);
                }
                None => {
                    return Err(JsonError::UnknownName {
                        path: path(i),
                        kind: "fluent",
                        name: name.clone(),
                    })
                }
            }
        }
        Ok(out)
    }
}

fn task_from_doc(
    fluents: Vec<String>,
    actions: Vec<ActionDoc>,
    init: Vec<String>,
    goal: Vec<String>,
) -> Result<Task, JsonError> {
    let resolver = NameResolver::new(&fluents);
    let mut built_actions = Vec::with_capacity(actions.len());
    for (ai, a) in actions.iter().enumerate() {
        let field = |f: &'static str| move |i: usize| format!("actions[{ai}].{f}[{i}]");
        built_actions.push(Action {
            id: ActionId::new(ai),
            name: a.name.clone(),
            pre_pos: resolver.set(&a.pre_pos, field("pre_pos"))?,
            pre_neg: resolver.set(&a.pre_neg, field("pre_neg"))?,
            add: resolver.set(&a.add, field("add"))?,
            del: resolver.set(&a.del, field("del"))?,
            cost: a.cost,
        });
    }
    let init = resolver.set(&init, |i| format!("init[{i}]"))?;
    let goal = resolver.set(&goal, |i| format!("goal[{i}]"))?;
    let fluents = fluents
        .into_iter()
        .enumerate()
        .map(|(i, name)| Fluent { id: FluentId::new(i), name })
        .collect();
    let task = Task::from_parts(fluents, built_actions, init, goal);
    let report = validate_task(&task);
    if !report.is_valid() {
        return Err(JsonError::InvalidTask(report.to_string()));
    }
    Ok(task)
}

fn doc_parts(task: &Task) -> (Vec<String>, Vec<ActionDoc>, Vec<String>, Vec<String>) {
    let fluents: Vec<String> = task.fluents().iter().map(|f| f.name.clone()).collect();
    let actions: Vec<ActionDoc> = task
        .actions()
        .iter()
        .map(|a| ActionDoc {
            name: a.name.clone(),
            pre_pos: task.set_names(&a.pre_pos),
            pre_neg: task.set_names(&a.pre_neg),
            add: task.set_names(&a.add),
            del: task.set_names(&a.del),
            cost: a.cost,
        })
        .collect();
    (fluents, actions, task.set_names(task.init()), task.set_names(task.goal()))
}

/// Parses a `strips-task/1` document.
pub fn read_task_json(text: &str) -> Result<Task, JsonError> {
    let doc: TaskDoc = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    if doc.format != TASK_FORMAT {
        return Err(JsonError::Format { expected: TASK_FORMAT, found: doc.format });
    }
    task_from_doc(doc.fluents, doc.actions, doc.init, doc.goal)
}

/// Serializes a task as a `strips-task/1` document (pretty, LF, trailing
/// newline). Byte-deterministic for a given task.
pub fn write_task_json(task: &Task) -> String {
    let (fluents, actions, init, goal) = doc_parts(task);
    let doc = TaskDoc { format: TASK_FORMAT.to_string(), fluents, actions, init, goal };
    let mut out = serde_json::to_string_pretty(&doc).expect("task serialization cannot fail");
    out.push('\n');
    out
}

/// Parses a `commit-task/1` document.
pub fn read_compiled_json(text: &str) -> Result<CompiledTask, JsonError> {
    let doc: CompiledDoc = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    if doc.format != COMPILED_FORMAT {
        return Err(JsonError::Format { expected: COMPILED_FORMAT, found: doc.format });
    }
    let task = task_from_doc(doc.task.fluents, doc.task.actions, doc.task.init, doc.task.goal)?;

    let resolve = |name: &str, path: String| -> Result<FluentId, JsonError> {
        task.fluent_id(name).ok_or_else(|| JsonError::UnknownName {
            path,
            kind: "fluent",
            name: name.to_string(),
        })
    };

    let mut pending = FluentSet::new();
    for (i, name) in doc.pending_goals.iter().enumerate() {
        pending.insert(resolve(name, format!("pending_goals[{i}]"))?);
    }

    let mut commit_map = CommitFluentMap::default();
    for (goal, commit) in &doc.commit_fluents {
        let g = resolve(goal, format!("commit_fluents.{goal}"))?;
        let c = resolve(commit, format!("commit_fluents.{goal}"))?;
        commit_map.insert_pair(g, c);
    }

    if doc.provenance.len() != task.num_actions() {
        return Err(JsonError::Malformed(format!(
            "provenance holds {} entries for {} actions",
            doc.provenance.len(),
            task.num_actions()
        )));
    }
    let mut provenance = Vec::with_capacity(doc.provenance.len());
    for (i, p) in doc.provenance.iter().enumerate() {
        let variant = match p.variant.as_str() {
            "unchanged" => Variant::Unchanged,
            "commit" => Variant::Commit,
            "forcecommit" => Variant::ForceCommit,
            "simultaneous" => Variant::Simultaneous,
            other => {
                return Err(JsonError::Malformed(format!(
                    "provenance[{i}].variant: unknown variant `{other}`"
                )))
            }
        };
        let mut committed = FluentSet::new();
        for (j, name) in p.committed.iter().enumerate() {
            committed.insert(resolve(name, format!("provenance[{i}].committed[{j}]"))?);
        }
        if !committed.is_subset(&pending) {
            return Err(JsonError::Malformed(format!(
                "provenance[{i}]: committed goals must be pending goals"
            )));
        }
        provenance.push(CompiledAction {
            base: ActionId::new(p.base_id as usize),
            base_name: p.base.clone(),
            variant,
            committed,
        });
    }

    Ok(CompiledTask { task, pending, commit_map, provenance })
}

/// Serializes a compiled task with its commit map and provenance table.
pub fn write_compiled_json(compiled: &CompiledTask) -> String {
    let (fluents, actions, init, goal) = doc_parts(&compiled.task);
    let task = &compiled.task;
    let doc = CompiledDoc {
        format: COMPILED_FORMAT.to_string(),
        task: TaskBody { fluents, actions, init, goal },
        pending_goals: task.set_names(&compiled.pending),
        commit_fluents: compiled
            .commit_map
            .iter()
            .map(|(g, c)| (task.fluent_name(g).to_string(), task.fluent_name(c).to_string()))
            .collect(),
        provenance: compiled
            .provenance
            .iter()
            .map(|p| ProvenanceDoc {
                base_id: p.base.index() as u32,
                base: p.base_name.clone(),
                variant: p.variant.as_str().to_string(),
                committed: task.set_names(&p.committed),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    out.push('\n');
    out
}

/// Either kind of task document, sniffed by the `format` header.
pub enum LoadedTask {
    Plain(Task),
    Compiled(CompiledTask),
}

pub fn read_any_task_json(text: &str) -> Result<LoadedTask, JsonError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
    }
    let header: Header =
        serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    match header.format.as_str() {
        TASK_FORMAT => Ok(LoadedTask::Plain(read_task_json(text)?)),
        COMPILED_FORMAT => Ok(LoadedTask::Compiled(read_compiled_json(text)?)),
        other => Err(JsonError::Format {
            expected: "strips-task/1 or commit-task/1",
            found: other.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(untagged)]
enum AchieverDoc {
    Init(&'static str),
    Step { step: usize },
}

fn achiever_doc(a: Achiever) -> AchieverDoc {
    match a {
        Achiever::Init => AchieverDoc::Init("init"),
        Achiever::Step(step) => AchieverDoc::Step { step },
    }
}

/// Renders an achievement report as JSON keyed by goal names.
pub fn achievement_report_json(task: &Task, report: &AchievementReport) -> String {
    #[derive(Serialize)]
    struct TransientDoc {
        from: AchieverDoc,
        deleted_at: usize,
    }
    #[derive(Serialize)]
    struct GoalDoc {
        goal: String,
        achiever: AchieverDoc,
        transients: Vec<TransientDoc>,
    }
    #[derive(Serialize)]
    struct ReportDoc {
        format: &'static str,
        goals: Vec<GoalDoc>,
    }
    let doc = ReportDoc {
        format: ACHIEVEMENT_FORMAT,
        goals: report
            .goals
            .iter()
            .map(|g| GoalDoc {
                goal: task.fluent_name(g.goal).to_string(),
                achiever: achiever_doc(g.achiever),
                transients: g
                    .transients
                    .iter()
                    .map(|&(from, deleted_at)| TransientDoc { from: achiever_doc(from), deleted_at })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    out.push('\n');
    out
}

/// Renders a plan mapping. `from` is the task the source plan lives in,
/// `to` the task of the mapped plan.
pub fn mapping_result_json(from: &Task, to: &Task, result: &MappingResult) -> String {
    #[derive(Serialize)]
    struct StepDoc {
        source: String,
        target: String,
        variant: String,
    }
    #[derive(Serialize)]
    struct MappingDoc {
        format: &'static str,
        plan: Vec<String>,
        cost: u64,
        steps: Vec<StepDoc>,
        commit_points: BTreeMap<String, usize>,
    }
    let doc = MappingDoc {
        format: MAPPING_FORMAT,
        plan: result.plan.names(to).iter().map(|s| s.to_string()).collect(),
        cost: result.plan.cost,
        steps: result
            .steps
            .iter()
            .map(|s| StepDoc {
                source: from.action(s.source).name.clone(),
                target: to.action(s.target).name.clone(),
                variant: s.variant.as_str().to_string(),
            })
            .collect(),
        commit_points: result
            .commit_points
            .iter()
            .map(|(&g, &i)| (from.fluent_name(g).to_string(), i))
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    out.push('\n');
    out
}
