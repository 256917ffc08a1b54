//! Compilation of a STRIPS task into its goal-commit form.
//!
//! Every pending goal `g` (a goal that is false initially and addable by
//! some action) gets a companion commit fluent. Goal-adding actions are
//! expanded into variants that may additionally set commit fluents for a
//! chosen subset of the goals they add; goal-deleting actions are guarded
//! so they can never undo a committed goal. The compiled goal asks for the
//! commit fluents instead of the pending goals themselves, so a plan for
//! the compiled task states exactly which occurrence of which action
//! permanently achieves each goal.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::bitset::FluentSet;
use crate::strips::{Action, ActionId, Fluent, FluentId, Task};

/// How an action interacts with the pending goals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalClass {
    /// Adds at least one pending goal, deletes none.
    AddOnly,
    /// Deletes at least one pending goal, adds none.
    DelOnly,
    /// Adds and deletes pending goals.
    AddAndDel,
    /// Touches no pending goal.
    Neutral,
}

/// Which construction produced a compiled action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Unchanged,
    Commit,
    ForceCommit,
    Simultaneous,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Unchanged => "unchanged",
            Variant::Commit => "commit",
            Variant::ForceCommit => "forcecommit",
            Variant::Simultaneous => "simultaneous",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bijection between pending goals and their commit fluents.
#[derive(Clone, Debug, Default)]
pub struct CommitFluentMap {
    goal_to_commit: BTreeMap<FluentId, FluentId>,
    commit_to_goal: BTreeMap<FluentId, FluentId>,
}

impl CommitFluentMap {
    pub(crate) fn insert_pair(&mut self, goal: FluentId, commit: FluentId) {
        self.goal_to_commit.insert(goal, commit);
        self.commit_to_goal.insert(commit, goal);
    }

    pub fn commit_of(&self, goal: FluentId) -> Option<FluentId> {
        self.goal_to_commit.get(&goal).copied()
    }

    pub fn goal_of(&self, commit: FluentId) -> Option<FluentId> {
        self.commit_to_goal.get(&commit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FluentId, FluentId)> + '_ {
        self.goal_to_commit.iter().map(|(&g, &c)| (g, c))
    }

    pub fn len(&self) -> usize {
        self.goal_to_commit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goal_to_commit.is_empty()
    }
}

/// Naming rule for the commit companion of a goal fluent.
pub fn commit_fluent_name(goal_name: &str) -> String {
    format!("{goal_name}--commit")
}

/// Provenance of one compiled action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledAction {
    /// Id of the base action in the original task.
    pub base: ActionId,
    /// Name of the base action; lets provenance survive serialization
    /// without the base task at hand.
    pub base_name: String,
    pub variant: Variant,
    /// Goals (base-task fluent ids) committed by this variant. Empty for
    /// `ForceCommit` and `Unchanged`.
    pub committed: FluentSet,
}

/// The compiled task plus everything needed to map plans back and forth.
#[derive(Clone, Debug)]
pub struct CompiledTask {
    /// The commit planning task itself.
    pub task: Task,
    /// Pending goals of the original task (ids valid in both tasks,
    /// since the compiled fluent list extends the original one).
    pub pending: FluentSet,
    pub commit_map: CommitFluentMap,
    /// Indexed by compiled action id.
    pub provenance: Vec<CompiledAction>,
}

impl CompiledTask {
    /// The commit fluents as a set over the compiled universe.
    pub fn commit_fluents(&self) -> FluentSet {
        self.commit_map.iter().map(|(_, c)| c).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CompileOptions {
    /// Maximum number of pending goals a single action may add; each such
    /// action expands into `2^n` variants, so this caps the blowup.
    pub max_subset_exponent: u32,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { max_subset_exponent: 12 }
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("task is invalid: {0}")]
    InvalidTask(String),
    #[error("generated name `{name}` collides with an existing {kind}")]
    NameCollision { name: String, kind: &'static str },
    #[error(
        "action `{action}` adds {exponent} pending goals, above the cap of {cap} \
         (full compilation would hold {forecast} actions)"
    )]
    SubsetCapExceeded { action: String, exponent: u32, cap: u32, forecast: u64 },
    #[error("{exponent} goals exceed the subset cap of {cap}")]
    SubsetCountExceeded { exponent: u32, cap: u32 },
}

/// Goals that are false initially and addable by some action.
pub fn pending_goals(task: &Task) -> FluentSet {
    let mut addable = FluentSet::new();
    for action in task.actions() {
        addable.union_with(&action.add);
    }
    let mut pending = task.goal().difference(task.init());
    pending.intersect_with(&addable);
    pending
}

/// Classifies an action by its interaction with the pending goals.
pub fn classify_action(action: &Action, pending: &FluentSet) -> GoalClass {
    let adds = action.add.intersects(pending);
    let dels = action.del.intersects(pending);
    match (adds, dels) {
        (true, false) => GoalClass::AddOnly,
        (false, true) => GoalClass::DelOnly,
        (true, true) => GoalClass::AddAndDel,
        (false, false) => GoalClass::Neutral,
    }
}

/// All `2^n` subsets of the given goal fluents, ordered by size and then
/// lexicographically by the sorted member names. The empty subset comes
/// first.
pub fn commit_subsets(task: &Task, goals: &FluentSet, cap: u32) -> Result<Vec<FluentSet>, CompileError> {
    let n = goals.len();
    if n as u32 > cap {
        // `compile` guards per action with the richer error before
        // reaching this point.
        return Err(CompileError::SubsetCountExceeded { exponent: n as u32, cap });
    }
    // Order members by fluent name so subset order is name-lexicographic.
    let mut members: Vec<FluentId> = goals.iter().collect();
    members.sort_by(|&a, &b| task.fluent_name(a).cmp(task.fluent_name(b)));

    let mut subsets: Vec<(usize, Vec<usize>)> = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let chosen: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        subsets.push((chosen.len(), chosen));
    }
    // Position vectors over name-sorted members compare lexicographically
    // exactly like the name sequences themselves.
    subsets.sort();
    Ok(subsets
        .into_iter()
        .map(|(_, chosen)| chosen.into_iter().map(|i| members[i]).collect())
        .collect())
}

/// Closed-form size of the compilation without building it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeForecast {
    pub compiled_action_count: u64,
    pub max_subset_exponent: u32,
}

pub fn forecast_size(task: &Task) -> SizeForecast {
    let pending = pending_goals(task);
    let mut count: u64 = 0;
    let mut max_exp: u32 = 0;
    for action in task.actions() {
        match classify_action(action, &pending) {
            GoalClass::AddOnly | GoalClass::AddAndDel => {
                let n = action.add.intersection(&pending).len() as u32;
                max_exp = max_exp.max(n);
                let variants = if n >= 63 { u64::MAX } else { 1u64 << n };
                count = count.saturating_add(variants);
            }
            GoalClass::DelOnly | GoalClass::Neutral => count = count.saturating_add(1),
        }
    }
    SizeForecast { compiled_action_count: count, max_subset_exponent: max_exp }
}

fn variant_name(task: &Task, base: &str, variant: Variant, committed: &FluentSet) -> String {
    match variant {
        Variant::Unchanged => base.to_string(),
        Variant::Commit if committed.is_empty() => base.to_string(),
        Variant::Commit => {
            let mut names = task.set_names(committed);
            names.sort();
            format!("{base}--commit--{}", names.join("--"))
        }
        Variant::ForceCommit => format!("{base}--forcecommit"),
        Variant::Simultaneous => {
            if committed.is_empty() {
                format!("{base}--sim")
            } else {
                let mut names = task.set_names(committed);
                names.sort();
                format!("{base}--sim--{}", names.join("--"))
            }
        }
    }
}

/// Compiles a task into its commit form.
///
/// The compiled fluent list is the original list followed by one commit
/// fluent per pending goal (in ascending goal id order), so original
/// fluent ids remain valid in the compiled task.
pub fn compile(task: &Task, options: &CompileOptions) -> Result<CompiledTask, CompileError> {
    let report = crate::strips::validate_task(task);
    if !report.is_valid() {
        return Err(CompileError::InvalidTask(report.to_string()));
    }

    let pending = pending_goals(task);

    // Commit fluent universe: original fluents plus one commit fluent per
    // pending goal.
    let mut fluents: Vec<Fluent> = task.fluents().to_vec();
    let mut commit_map = CommitFluentMap::default();
    for goal in pending.iter() {
        let name = commit_fluent_name(task.fluent_name(goal));
        if task.fluent_id(&name).is_some() {
            return Err(CompileError::NameCollision { name, kind: "fluent" });
        }
        let id = FluentId::new(fluents.len());
        fluents.push(Fluent { id, name });
        commit_map.insert_pair(goal, id);
    }

    let commit_set = |goals: &FluentSet| -> FluentSet {
        goals.iter().map(|g| commit_map.commit_of(g).expect("pending goal has a commit fluent")).collect()
    };

    let forecast = forecast_size(task);
    let mut actions: Vec<Action> = Vec::with_capacity(forecast.compiled_action_count.min(1 << 20) as usize);
    let mut provenance: Vec<CompiledAction> = Vec::with_capacity(actions.capacity());
    let mut names: HashSet<String> = HashSet::new();

    let push = |actions: &mut Vec<Action>,
                    provenance: &mut Vec<CompiledAction>,
                    names: &mut HashSet<String>,
                    base: &Action,
                    variant: Variant,
                    committed: FluentSet,
                    pre_neg: FluentSet,
                    add: FluentSet|
     -> Result<(), CompileError> {
        let name = variant_name(task, &base.name, variant, &committed);
        if !names.insert(name.clone()) {
            return Err(CompileError::NameCollision { name, kind: "action" });
        }
        let id = ActionId::new(actions.len());
        actions.push(Action {
            id,
            name,
            pre_pos: base.pre_pos.clone(),
            pre_neg,
            add,
            del: base.del.clone(),
            cost: base.cost,
        });
        provenance.push(CompiledAction {
            base: base.id,
            base_name: base.name.clone(),
            variant,
            committed,
        });
        Ok(())
    };

    for base in task.actions() {
        match classify_action(base, &pending) {
            GoalClass::Neutral => {
                push(
                    &mut actions,
                    &mut provenance,
                    &mut names,
                    base,
                    Variant::Unchanged,
                    FluentSet::new(),
                    base.pre_neg.clone(),
                    base.add.clone(),
                )?;
            }
            GoalClass::DelOnly => {
                let mut pre_neg = base.pre_neg.clone();
                pre_neg.union_with(&commit_set(&base.del.intersection(&pending)));
                push(
                    &mut actions,
                    &mut provenance,
                    &mut names,
                    base,
                    Variant::ForceCommit,
                    FluentSet::new(),
                    pre_neg,
                    base.add.clone(),
                )?;
            }
            class @ (GoalClass::AddOnly | GoalClass::AddAndDel) => {
                let added_goals = base.add.intersection(&pending);
                let n = added_goals.len() as u32;
                if n > options.max_subset_exponent {
                    return Err(CompileError::SubsetCapExceeded {
                        action: base.name.clone(),
                        exponent: n,
                        cap: options.max_subset_exponent,
                        forecast: forecast.compiled_action_count,
                    });
                }
                let variant = if class == GoalClass::AddOnly {
                    Variant::Commit
                } else {
                    Variant::Simultaneous
                };
                // Guard for goals this action deletes; empty for AddOnly.
                let deleted_guard = commit_set(&base.del.intersection(&pending));
                for subset in commit_subsets(task, &added_goals, options.max_subset_exponent)? {
                    let subset_commits = commit_set(&subset);
                    let mut pre_neg = base.pre_neg.clone();
                    pre_neg.union_with(&subset_commits);
                    pre_neg.union_with(&deleted_guard);
                    let mut add = base.add.clone();
                    add.union_with(&subset_commits);
                    push(&mut actions, &mut provenance, &mut names, base, variant, subset, pre_neg, add)?;
                }
            }
        }
    }

    // Goal: keep non-pending goals, replace each pending goal by its commit.
    let mut goal = task.goal().difference(&pending);
    goal.union_with(&commit_set(&pending));

    let compiled = Task::from_parts(fluents, actions, task.init().clone(), goal);
    debug_assert!(crate::strips::validate_task(&compiled).is_valid());

    Ok(CompiledTask { task: compiled, pending, commit_map, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::test_tasks::two_fluent_task;
    use crate::strips::TaskBuilder;
    use proptest::prelude::*;

    #[test]
    fn pending_goals_worked_example() {
        let task = two_fluent_task();
        let pending = pending_goals(&task);
        assert_eq!(task.set_names(&pending), vec!["x", "y"]);
    }

    #[test]
    fn pending_goals_excludes_initial_and_unaddable() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let y = b.fluent("y");
        let z = b.fluent("z");
        b.action("a", &[], &[], &[y], &[], 1);
        b.set_init(&[x]);
        b.set_goal(&[x, y, z]); // x initially true, z has no adder
        let task = b.build();
        let pending = pending_goals(&task);
        assert_eq!(task.set_names(&pending), vec!["y"]);
    }

    #[test]
    fn classification_on_worked_example() {
        let task = two_fluent_task();
        let pending = pending_goals(&task);
        assert_eq!(classify_action(&task.actions()[0], &pending), GoalClass::AddOnly);
        assert_eq!(classify_action(&task.actions()[1], &pending), GoalClass::AddAndDel);

        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let w = b.fluent("w");
        b.action("touches-nothing", &[x], &[], &[w], &[], 1);
        b.set_goal(&[x]);
        b.action("adder", &[], &[], &[x], &[], 1);
        let t2 = b.build();
        let p2 = pending_goals(&t2);
        assert_eq!(classify_action(&t2.actions()[0], &p2), GoalClass::Neutral);
    }

    #[test]
    fn commit_subsets_order() {
        let task = two_fluent_task();
        let x = task.fluent_id("x").unwrap();
        let y = task.fluent_id("y").unwrap();
        let subsets = commit_subsets(&task, &FluentSet::from_ids([x, y]), 12).unwrap();
        let rendered: Vec<Vec<String>> = subsets.iter().map(|s| task.set_names(s)).collect();
        assert_eq!(
            rendered,
            vec![
                Vec::<String>::new(),
                vec!["x".to_string()],
                vec!["y".to_string()],
                vec!["x".to_string(), "y".to_string()],
            ]
        );

        assert_eq!(commit_subsets(&task, &FluentSet::new(), 12).unwrap(), vec![FluentSet::new()]);
        assert_eq!(commit_subsets(&task, &FluentSet::from_ids([x]), 12).unwrap().len(), 2);
    }

    /// Worked-example compilation, checked field by field.
    #[test]
    fn compile_worked_example_golden() {
        let task = two_fluent_task();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        let tc = &compiled.task;

        let x = task.fluent_id("x").unwrap();
        let y = task.fluent_id("y").unwrap();
        let xc = compiled.commit_map.commit_of(x).unwrap();
        let yc = compiled.commit_map.commit_of(y).unwrap();
        assert_eq!(tc.fluent_name(xc), "x--commit");
        assert_eq!(tc.fluent_name(yc), "y--commit");

        assert_eq!(tc.num_fluents(), 4);
        assert_eq!(tc.num_actions(), 4);
        assert_eq!(tc.init(), task.init());
        assert_eq!(tc.goal(), &FluentSet::from_ids([xc, yc]));

        let names: Vec<&str> = tc.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["a1", "a1--commit--x", "a2--sim", "a2--sim--y"]);

        // a1 (empty-subset commit variant) is field-for-field the base action.
        let a1 = &tc.actions()[0];
        assert!(a1.pre_pos.is_empty() && a1.pre_neg.is_empty() && a1.del.is_empty());
        assert_eq!(a1.add, FluentSet::from_ids([x]));
        assert_eq!(compiled.provenance[0].variant, Variant::Commit);
        assert!(compiled.provenance[0].committed.is_empty());

        let a1x = &tc.actions()[1];
        assert_eq!(a1x.pre_neg, FluentSet::from_ids([xc]));
        assert_eq!(a1x.add, FluentSet::from_ids([x, xc]));
        assert!(a1x.del.is_empty());

        let a2e = &tc.actions()[2];
        assert_eq!(a2e.pre_pos, FluentSet::from_ids([x]));
        assert_eq!(a2e.pre_neg, FluentSet::from_ids([xc]));
        assert_eq!(a2e.add, FluentSet::from_ids([y]));
        assert_eq!(a2e.del, FluentSet::from_ids([x]));

        let a2y = &tc.actions()[3];
        assert_eq!(a2y.pre_neg, FluentSet::from_ids([xc, yc]));
        assert_eq!(a2y.add, FluentSet::from_ids([y, yc]));
        assert_eq!(a2y.del, FluentSet::from_ids([x]));

        // Cost preservation across all variants.
        for (action, prov) in tc.actions().iter().zip(&compiled.provenance) {
            assert_eq!(action.cost, task.action(prov.base).cost);
        }
    }

    #[test]
    fn no_pending_goals_leaves_task_unchanged() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let y = b.fluent("y");
        for i in 0..7 {
            b.action(&format!("a{i}"), &[x], &[], &[y], &[], 1);
        }
        b.set_init(&[x]);
        b.set_goal(&[x]);
        let task = b.build();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        assert_eq!(compiled.task.num_actions(), 7);
        assert_eq!(compiled.task.num_fluents(), task.num_fluents());
        assert_eq!(compiled.task.goal(), task.goal());
        assert!(compiled.provenance.iter().all(|p| p.variant == Variant::Unchanged));
        assert_eq!(forecast_size(&task).compiled_action_count, 7);
    }

    #[test]
    fn three_pending_goals_expand_to_eight_variants() {
        let mut b = TaskBuilder::new();
        let g1 = b.fluent("g1");
        let g2 = b.fluent("g2");
        let g3 = b.fluent("g3");
        b.action("mega", &[], &[], &[g1, g2, g3], &[], 2);
        b.set_goal(&[g1, g2, g3]);
        let task = b.build();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        assert_eq!(compiled.task.num_actions(), 8);
        let forecast = forecast_size(&task);
        assert_eq!(forecast.compiled_action_count, 8);
        assert_eq!(forecast.max_subset_exponent, 3);
    }

    #[test]
    fn subset_cap_enforced() {
        let mut b = TaskBuilder::new();
        let goals: Vec<_> = (0..4).map(|i| b.fluent(&format!("g{i}"))).collect();
        b.action("wide", &[], &[], &goals, &[], 1);
        b.set_goal(&goals);
        let task = b.build();
        let err = compile(&task, &CompileOptions { max_subset_exponent: 3 }).unwrap_err();
        match err {
            CompileError::SubsetCapExceeded { action, exponent, cap, forecast } => {
                assert_eq!(action, "wide");
                assert_eq!(exponent, 4);
                assert_eq!(cap, 3);
                assert_eq!(forecast, 16);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn commit_name_collision_is_an_error() {
        let mut b = TaskBuilder::new();
        let g = b.fluent("g");
        b.fluent("g--commit");
        b.action("a", &[], &[], &[g], &[], 1);
        b.set_goal(&[g]);
        let task = b.build();
        let err = compile(&task, &CompileOptions::default()).unwrap_err();
        assert!(matches!(err, CompileError::NameCollision { kind: "fluent", .. }));
    }

    #[test]
    fn forcecommit_guards_deleted_goals() {
        let mut b = TaskBuilder::new();
        let g = b.fluent("g");
        let f = b.fluent("f");
        b.action("make", &[], &[], &[g], &[], 1);
        b.action("break", &[g], &[], &[f], &[g], 1);
        b.set_goal(&[g]);
        let task = b.build();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        let names: Vec<&str> = compiled.task.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["make", "make--commit--g", "break--forcecommit"]);
        let fc = &compiled.task.actions()[2];
        let gc = compiled.commit_map.commit_of(g).unwrap();
        assert_eq!(fc.pre_neg, FluentSet::from_ids([gc]));
        assert_eq!(fc.add, FluentSet::from_ids([f]));
        assert_eq!(fc.del, FluentSet::from_ids([g]));
    }

    proptest! {
        // Size formula: |A_c| = Σ_{adders} 2^{n_a} + |del-only| + |neutral|,
        // and the forecast agrees with the built task.
        #[test]
        fn size_formula_holds(seed in 0u64..400) {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            let compiled = compile(&task, &CompileOptions::default()).unwrap();
            let pending = pending_goals(&task);
            let mut expected: u64 = 0;
            for action in task.actions() {
                expected += match classify_action(action, &pending) {
                    GoalClass::AddOnly | GoalClass::AddAndDel => {
                        1u64 << action.add.intersection(&pending).len()
                    }
                    _ => 1,
                };
            }
            prop_assert_eq!(compiled.task.num_actions() as u64, expected);
            prop_assert_eq!(forecast_size(&task).compiled_action_count, expected);
        }

        // Structural invariants: partition of variants by class, cost
        // preservation, monotone commit fluents, empty-subset conservativity.
        #[test]
        fn compiled_structure_invariants(seed in 0u64..400) {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            let compiled = compile(&task, &CompileOptions::default()).unwrap();
            let pending = pending_goals(&task);
            let commit_fluents = compiled.commit_fluents();

            // Task tuple: fluent list extended in place, init unchanged,
            // goal swaps each pending goal for its commit fluent.
            prop_assert_eq!(compiled.task.num_fluents(), task.num_fluents() + pending.len());
            prop_assert!(task
                .fluents()
                .iter()
                .zip(compiled.task.fluents())
                .all(|(a, b)| a.name == b.name));
            prop_assert_eq!(compiled.task.init(), task.init());
            let expected_goal = task.goal().difference(&pending).union(&commit_fluents);
            prop_assert_eq!(compiled.task.goal(), &expected_goal);

            let mut seen_base = vec![false; task.num_actions()];
            for (action, prov) in compiled.task.actions().iter().zip(&compiled.provenance) {
                seen_base[prov.base.index()] = true;
                let base = task.action(prov.base);
                prop_assert_eq!(&prov.base_name, &base.name);
                prop_assert_eq!(action.cost, base.cost);
                // No compiled action deletes a commit fluent.
                prop_assert!(!action.del.intersects(&commit_fluents));
                // committed ⊆ add(base) ∩ pending.
                prop_assert!(prov.committed.is_subset(&base.add.intersection(&pending)));
                let class = classify_action(base, &pending);
                let expected_variant = match class {
                    GoalClass::Neutral => Variant::Unchanged,
                    GoalClass::DelOnly => Variant::ForceCommit,
                    GoalClass::AddOnly => Variant::Commit,
                    GoalClass::AddAndDel => Variant::Simultaneous,
                };
                prop_assert_eq!(prov.variant, expected_variant);
                if prov.variant == Variant::Commit && prov.committed.is_empty() {
                    // Field-for-field equal to the base action.
                    prop_assert_eq!(&action.pre_pos, &base.pre_pos);
                    prop_assert_eq!(&action.pre_neg, &base.pre_neg);
                    prop_assert_eq!(&action.add, &base.add);
                    prop_assert_eq!(&action.del, &base.del);
                    prop_assert_eq!(&action.name, &base.name);
                }
                if prov.variant == Variant::Simultaneous && prov.committed.is_empty() {
                    // Differs from base only in commit-fluent guards.
                    prop_assert_eq!(&action.add, &base.add);
                    prop_assert_eq!(&action.del, &base.del);
                    prop_assert_eq!(action.pre_neg.difference(&commit_fluents), base.pre_neg.clone());
                }
            }
            prop_assert!(seen_base.iter().all(|&b| b), "every base action maps to at least one variant");
        }
    }
}
