//! Constructive plan mappings between a task and its commit compilation,
//! plus post-hoc attribution of permanent goal achievers.
//!
//! The forward direction rewrites each step of a valid base plan to the
//! compiled variant committing exactly the goals that occurrence achieves
//! permanently. The backward direction is a pure provenance lookup. Both
//! preserve plan length and cost, and both validate their output.

use std::collections::{BTreeMap, HashMap};

use crate::bitset::FluentSet;
use crate::compile::{CompiledTask, Variant};
use crate::strips::{validate_plan, ActionId, FluentId, Plan, PlanCheck, Task, Trace};

/// Where a goal was achieved for good.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Achiever {
    /// True in the initial state and never falsified afterwards.
    Init,
    /// 0-based plan position of the achieving action.
    Step(usize),
}

/// Achievement record for one goal fluent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoalAchievement {
    pub goal: FluentId,
    pub achiever: Achiever,
    /// Earlier periods in which the goal held but was later undone:
    /// `(start, delete_step)` where `start` is the adding step (or the
    /// initial state) and `delete_step` the action that falsified it.
    pub transients: Vec<(Achiever, usize)>,
}

/// Per-goal achievement attribution for a valid plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AchievementReport {
    pub goals: Vec<GoalAchievement>,
}

impl AchievementReport {
    pub fn achiever_of(&self, goal: FluentId) -> Option<Achiever> {
        self.goals.iter().find(|g| g.goal == goal).map(|g| g.achiever)
    }
}

/// One rewritten plan step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedStep {
    pub source: ActionId,
    pub target: ActionId,
    pub variant: Variant,
}

/// A plan translated to the other task, with per-step correspondence.
#[derive(Clone, Debug)]
pub struct MappingResult {
    pub plan: Plan,
    pub steps: Vec<MappedStep>,
    /// For forward maps: the step at which each pending goal's commit was
    /// attached. Empty for backward maps.
    pub commit_points: BTreeMap<FluentId, usize>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum PlanMapError {
    #[error("input plan is not valid for its task: {0}")]
    InvalidPlan(String),
    #[error("provenance is corrupt: {0}")]
    CorruptProvenance(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn require_valid(task: &Task, steps: &[ActionId]) -> Result<(u64, Trace), PlanMapError> {
    match validate_plan(task, steps) {
        PlanCheck::Valid { cost, trace } => Ok((cost, trace)),
        other => Err(PlanMapError::InvalidPlan(other.describe())),
    }
}

/// For each goal, the step after which it stays true through the end of
/// the plan, plus every earlier transient achievement interval.
///
/// Requires a valid plan. A goal true initially and never falsified is
/// attributed to the initial state; if it is falsified and later restored,
/// the restoring action is the achiever.
pub fn permanent_achievers(task: &Task, plan: &Plan) -> Result<AchievementReport, PlanMapError> {
    let (_cost, trace) = require_valid(task, &plan.steps)?;
    let n = plan.steps.len();
    let mut goals = Vec::new();
    for goal in task.goal().iter() {
        let mut transients = Vec::new();
        let mut open: Option<Achiever> = trace.states[0].contains(goal).then_some(Achiever::Init);
        for step in 0..n {
            let before = trace.states[step].contains(goal);
            let after = trace.states[step + 1].contains(goal);
            match (before, after) {
                (false, true) => open = Some(Achiever::Step(step)),
                (true, false) => {
                    let start = open.take().expect("truth interval must have a start");
                    transients.push((start, step));
                }
                _ => {}
            }
        }
        let achiever = open.ok_or_else(|| {
            PlanMapError::Internal(format!(
                "goal `{}` not true at the end of a valid plan",
                task.fluent_name(goal)
            ))
        })?;
        goals.push(GoalAchievement { goal, achiever, transients });
    }
    Ok(AchievementReport { goals })
}

/// Lookup key: one compiled variant per (base action, committed subset).
fn variant_index(compiled: &CompiledTask) -> HashMap<(ActionId, FluentSet), ActionId> {
    let mut map = HashMap::new();
    for (idx, prov) in compiled.provenance.iter().enumerate() {
        map.insert((prov.base, prov.committed.clone()), ActionId::new(idx));
    }
    map
}

/// Rewrites a valid base-task plan into a compiled-task plan of the same
/// length and cost: each occurrence commits exactly the pending goals it
/// permanently achieves, goal-deleting actions become their guarded
/// variants, and neutral actions pass through unchanged.
pub fn forward_map(
    task: &Task,
    plan: &Plan,
    compiled: &CompiledTask,
) -> Result<MappingResult, PlanMapError> {
    let report = permanent_achievers(task, plan)?;
    let achiever_by_goal: BTreeMap<FluentId, Achiever> =
        report.goals.iter().map(|g| (g.goal, g.achiever)).collect();
    let index = variant_index(compiled);

    let mut steps = Vec::with_capacity(plan.steps.len());
    let mut commit_points = BTreeMap::new();
    for (pos, &source) in plan.steps.iter().enumerate() {
        let base = task.action(source);
        // Goals this occurrence permanently achieves.
        let committed: FluentSet = base
            .add
            .intersection(&compiled.pending)
            .iter()
            .filter(|g| achiever_by_goal.get(g) == Some(&Achiever::Step(pos)))
            .collect();
        let target = index.get(&(source, committed.clone())).copied().ok_or_else(|| {
            PlanMapError::CorruptProvenance(format!(
                "no compiled variant of `{}` committing {:?}",
                base.name,
                task.set_names(&committed)
            ))
        })?;
        for goal in committed.iter() {
            commit_points.insert(goal, pos);
        }
        steps.push(MappedStep { source, target, variant: compiled.provenance[target.index()].variant });
    }

    let mapped = Plan::of(&compiled.task, steps.iter().map(|s| s.target).collect());
    let check = validate_plan(&compiled.task, &mapped.steps);
    if !check.is_valid() {
        return Err(PlanMapError::Internal(format!(
            "forward-mapped plan failed to validate: {}",
            check.describe()
        )));
    }
    Ok(MappingResult { plan: mapped, steps, commit_points })
}

/// Replaces each compiled action by its base action via the provenance
/// table — a pure lookup, no name parsing. Validates the result on the
/// base task.
pub fn backward_map(
    task: &Task,
    compiled: &CompiledTask,
    plan_c: &Plan,
) -> Result<MappingResult, PlanMapError> {
    require_valid(&compiled.task, &plan_c.steps)?;

    let mut steps = Vec::with_capacity(plan_c.steps.len());
    for &source in &plan_c.steps {
        let prov = compiled.provenance.get(source.index()).ok_or_else(|| {
            PlanMapError::CorruptProvenance(format!(
                "compiled action id {} has no provenance entry",
                source.index()
            ))
        })?;
        if prov.base.index() >= task.num_actions()
            || task.action(prov.base).name != prov.base_name
        {
            return Err(PlanMapError::CorruptProvenance(format!(
                "provenance of compiled action id {} names base `{}`, which does not match the task",
                source.index(),
                prov.base_name
            )));
        }
        steps.push(MappedStep { source, target: prov.base, variant: prov.variant });
    }

    let mapped = Plan::of(task, steps.iter().map(|s| s.target).collect());
    let check = validate_plan(task, &mapped.steps);
    if !check.is_valid() {
        return Err(PlanMapError::Internal(format!(
            "backward-mapped plan failed to validate: {}",
            check.describe()
        )));
    }
    Ok(MappingResult { plan: mapped, steps, commit_points: BTreeMap::new() })
}

/// For each pending goal, the plan position whose action committed it.
/// On a valid compiled plan every pending goal is committed exactly once
/// (commit fluents are monotone and committing variants forbid an earlier
/// commit), so duplicates or gaps indicate corruption.
pub fn commit_achievers(
    compiled: &CompiledTask,
    plan_c: &Plan,
) -> Result<BTreeMap<FluentId, usize>, PlanMapError> {
    require_valid(&compiled.task, &plan_c.steps)?;
    let mut points: BTreeMap<FluentId, usize> = BTreeMap::new();
    for (pos, &aid) in plan_c.steps.iter().enumerate() {
        let prov = compiled.provenance.get(aid.index()).ok_or_else(|| {
            PlanMapError::CorruptProvenance(format!(
                "compiled action id {} has no provenance entry",
                aid.index()
            ))
        })?;
        for goal in prov.committed.iter() {
            if points.insert(goal, pos).is_some() {
                return Err(PlanMapError::Internal(format!(
                    "goal `{}` committed twice",
                    compiled.task.fluent_name(goal)
                )));
            }
        }
    }
    for goal in compiled.pending.iter() {
        if !points.contains_key(&goal) {
            return Err(PlanMapError::Internal(format!(
                "pending goal `{}` never committed in a goal-reaching plan",
                compiled.task.fluent_name(goal)
            )));
        }
    }
    Ok(points)
}
