//! Ground STRIPS task model and execution semantics.
//!
//! A task is a tuple of fluents, actions, an initial state, and a positive
//! goal set. Actions carry positive and negative preconditions, add and
//! delete effects, and a non-negative integer cost. Everything is immutable
//! after construction and safe to share across threads.

use std::collections::HashMap;
use std::fmt;

use crate::bitset::FluentSet;

/// Dense index of a fluent within a task.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FluentId(u32);

impl FluentId {
    pub fn new(index: usize) -> Self {
        FluentId(u32::try_from(index).expect("fluent index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense index of an action within a task.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionId(u32);

impl ActionId {
    pub fn new(index: usize) -> Self {
        ActionId(u32::try_from(index).expect("action index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A state is the set of fluents currently true.
pub type State = FluentSet;

#[derive(Clone, Debug)]
pub struct Fluent {
    pub id: FluentId,
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct Action {
    pub id: ActionId,
    pub name: String,
    pub pre_pos: FluentSet,
    pub pre_neg: FluentSet,
    pub add: FluentSet,
    pub del: FluentSet,
    pub cost: u32,
}

/// A ground STRIPS planning task.
#[derive(Clone, Debug)]
pub struct Task {
    fluents: Vec<Fluent>,
    actions: Vec<Action>,
    init: State,
    goal: FluentSet,
    fluent_index: HashMap<String, FluentId>,
    action_index: HashMap<String, ActionId>,
}

impl Task {
    /// Assembles a task from raw parts. No invariants are enforced here;
    /// run [`validate_task`] to obtain a violation report.
    pub fn from_parts(fluents: Vec<Fluent>, actions: Vec<Action>, init: State, goal: FluentSet) -> Self {
        let mut fluent_index = HashMap::with_capacity(fluents.len());
        for f in &fluents {
            fluent_index.entry(f.name.clone()).or_insert(f.id);
        }
        let mut action_index = HashMap::with_capacity(actions.len());
        for a in &actions {
            action_index.entry(a.name.clone()).or_insert(a.id);
        }
        Task { fluents, actions, init, goal, fluent_index, action_index }
    }

    pub fn fluents(&self) -> &[Fluent] {
        &self.fluents
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &FluentSet {
        &self.goal
    }

    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn fluent(&self, id: FluentId) -> &Fluent {
        &self.fluents[id.index()]
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.index()]
    }

    pub fn fluent_name(&self, id: FluentId) -> &str {
        &self.fluents[id.index()].name
    }

    pub fn fluent_id(&self, name: &str) -> Option<FluentId> {
        self.fluent_index.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    /// Renders a fluent set as names in ascending id order.
    pub fn set_names(&self, set: &FluentSet) -> Vec<String> {
        set.iter().map(|id| self.fluent_name(id).to_string()).collect()
    }
}

/// Incremental task construction with name interning.
#[derive(Default)]
pub struct TaskBuilder {
    fluents: Vec<Fluent>,
    fluent_index: HashMap<String, FluentId>,
    actions: Vec<Action>,
    init: Vec<FluentId>,
    goal: Vec<FluentId>,
}

impl TaskBuilder {
    pub fn new() -> Self {
        TaskBuilder::default()
    }

    /// Interns a fluent name, returning its id.
    pub fn fluent(&mut self, name: &str) -> FluentId {
        if let Some(&id) = self.fluent_index.get(name) {
            return id;
        }
        let id = FluentId::new(self.fluents.len());
        self.fluents.push(Fluent { id, name: name.to_string() });
        self.fluent_index.insert(name.to_string(), id);
        id
    }

    pub fn action(
        &mut self,
        name: &str,
        pre_pos: &[FluentId],
        pre_neg: &[FluentId],
        add: &[FluentId],
        del: &[FluentId],
        cost: u32,
    ) -> ActionId {
        let id = ActionId::new(self.actions.len());
        self.actions.push(Action {
            id,
            name: name.to_string(),
            pre_pos: pre_pos.iter().copied().collect(),
            pre_neg: pre_neg.iter().copied().collect(),
            add: add.iter().copied().collect(),
            del: del.iter().copied().collect(),
            cost,
        });
        id
    }

    pub fn set_init(&mut self, ids: &[FluentId]) {
        self.init = ids.to_vec();
    }

    pub fn set_goal(&mut self, ids: &[FluentId]) {
        self.goal = ids.to_vec();
    }

    pub fn build(self) -> Task {
        Task::from_parts(
            self.fluents,
            self.actions,
            self.init.iter().copied().collect(),
            self.goal.iter().copied().collect(),
        )
    }
}

/// A plan: an ordered action sequence with its total cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<ActionId>,
    pub cost: u64,
}

impl Plan {
    /// Builds a plan over `task`, computing the total cost from the steps.
    pub fn of(task: &Task, steps: Vec<ActionId>) -> Plan {
        let cost = steps.iter().map(|&a| u64::from(task.action(a).cost)).sum();
        Plan { steps, cost }
    }

    pub fn empty() -> Plan {
        Plan { steps: Vec::new(), cost: 0 }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn names<'a>(&self, task: &'a Task) -> Vec<&'a str> {
        self.steps.iter().map(|&a| task.action(a).name.as_str()).collect()
    }
}

/// The state trajectory induced by applying a plan: `states[0]` is the
/// initial state and `states[i+1]` results from step `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<State>,
}

impl Trace {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trace holds at least the initial state")
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// A single task invariant violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    FluentIdMismatch { position: usize, id: FluentId },
    DuplicateFluentName { name: String },
    NonCanonicalFluentName { name: String },
    ActionIdMismatch { position: usize, id: ActionId },
    DuplicateActionName { name: String },
    NonCanonicalActionName { name: String },
    AddDelOverlap { action: String, fluent: String },
    PrePosNegOverlap { action: String, fluent: String },
    ActionFluentOutOfRange { action: String, field: &'static str, id: usize },
    InitOutOfRange { id: usize },
    GoalOutOfRange { id: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FluentIdMismatch { position, id } => {
                write!(f, "fluent at position {position} carries id {}", id.index())
            }
            Violation::DuplicateFluentName { name } => write!(f, "duplicate fluent name `{name}`"),
            Violation::NonCanonicalFluentName { name } => {
                write!(f, "fluent name `{name}` is not canonical (lowercase, no whitespace)")
            }
            Violation::ActionIdMismatch { position, id } => {
                write!(f, "action at position {position} carries id {}", id.index())
            }
            Violation::DuplicateActionName { name } => write!(f, "duplicate action name `{name}`"),
            Violation::NonCanonicalActionName { name } => {
                write!(f, "action name `{name}` is not canonical (lowercase, no whitespace)")
            }
            Violation::AddDelOverlap { action, fluent } => {
                write!(f, "action `{action}`: add/del overlap on {fluent}")
            }
            Violation::PrePosNegOverlap { action, fluent } => {
                write!(f, "action `{action}`: positive/negative precondition overlap on {fluent}")
            }
            Violation::ActionFluentOutOfRange { action, field, id } => {
                write!(f, "action `{action}`: {field} references fluent id {id} out of range")
            }
            Violation::InitOutOfRange { id } => write!(f, "init references fluent id {id} out of range"),
            Violation::GoalOutOfRange { id } => write!(f, "goal out of range: fluent id {id}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn canonical_name(name: &str) -> bool {
    !name.is_empty()
        && !name.chars().any(|c| c.is_whitespace() || c.is_uppercase())
}

fn check_range(set: &FluentSet, universe: usize) -> Option<usize> {
    match set.max_id() {
        Some(id) if id.index() >= universe => Some(id.index()),
        _ => None,
    }
}

/// Checks every task invariant and reports each violation found.
pub fn validate_task(task: &Task) -> ValidationReport {
    let mut report = ValidationReport::default();
    let universe = task.num_fluents();

    let mut seen = HashMap::new();
    for (pos, fluent) in task.fluents().iter().enumerate() {
        if fluent.id.index() != pos {
            report.violations.push(Violation::FluentIdMismatch { position: pos, id: fluent.id });
        }
        if !canonical_name(&fluent.name) {
            report
                .violations
                .push(Violation::NonCanonicalFluentName { name: fluent.name.clone() });
        }
        if seen.insert(fluent.name.clone(), ()).is_some() {
            report.violations.push(Violation::DuplicateFluentName { name: fluent.name.clone() });
        }
    }

    let mut seen_actions = HashMap::new();
    for (pos, action) in task.actions().iter().enumerate() {
        if action.id.index() != pos {
            report.violations.push(Violation::ActionIdMismatch { position: pos, id: action.id });
        }
        if !canonical_name(&action.name) {
            report
                .violations
                .push(Violation::NonCanonicalActionName { name: action.name.clone() });
        }
        if seen_actions.insert(action.name.clone(), ()).is_some() {
            report.violations.push(Violation::DuplicateActionName { name: action.name.clone() });
        }
        for (field, set) in [
            ("pre_pos", &action.pre_pos),
            ("pre_neg", &action.pre_neg),
            ("add", &action.add),
            ("del", &action.del),
        ] {
            if let Some(id) = check_range(set, universe) {
                report.violations.push(Violation::ActionFluentOutOfRange {
                    action: action.name.clone(),
                    field,
                    id,
                });
            }
        }
        for id in action.add.intersection(&action.del).iter() {
            report.violations.push(Violation::AddDelOverlap {
                action: action.name.clone(),
                fluent: fluent_label(task, id),
            });
        }
        for id in action.pre_pos.intersection(&action.pre_neg).iter() {
            report.violations.push(Violation::PrePosNegOverlap {
                action: action.name.clone(),
                fluent: fluent_label(task, id),
            });
        }
    }

    if let Some(id) = check_range(task.init(), universe) {
        report.violations.push(Violation::InitOutOfRange { id });
    }
    if let Some(id) = check_range(task.goal(), universe) {
        report.violations.push(Violation::GoalOutOfRange { id });
    }

    report
}

fn fluent_label(task: &Task, id: FluentId) -> String {
    if id.index() < task.num_fluents() {
        task.fluent_name(id).to_string()
    } else {
        format!("#{}", id.index())
    }
}

// ---------------------------------------------------------------------------
// Execution semantics
// ---------------------------------------------------------------------------

/// Why an action could not be applied in a state.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Inapplicability {
    #[error("action `{action}` requires `{fluent}` which is not true")]
    MissingPositive { action: String, fluent: String },
    #[error("action `{action}` forbids `{fluent}` which is true")]
    ForbiddenNegative { action: String, fluent: String },
}

/// True iff `pre_pos ⊆ state` and `pre_neg ∩ state = ∅`.
pub fn is_applicable(state: &State, action: &Action) -> bool {
    action.pre_pos.is_subset(state) && !action.pre_neg.intersects(state)
}

fn inapplicability(task: &Task, state: &State, action: &Action) -> Inapplicability {
    for id in action.pre_pos.iter() {
        if !state.contains(id) {
            return Inapplicability::MissingPositive {
                action: action.name.clone(),
                fluent: fluent_label(task, id),
            };
        }
    }
    for id in action.pre_neg.iter() {
        if state.contains(id) {
            return Inapplicability::ForbiddenNegative {
                action: action.name.clone(),
                fluent: fluent_label(task, id),
            };
        }
    }
    unreachable!("inapplicability queried for an applicable action")
}

/// `(state ∖ del) ∪ add`, without checking preconditions.
pub fn progress_unchecked(state: &State, action: &Action) -> State {
    let mut next = state.clone();
    next.difference_with(&action.del);
    next.union_with(&action.add);
    next
}

/// Applies an action, reporting the first violated precondition if any.
pub fn progress(task: &Task, state: &State, action: &Action) -> Result<State, Inapplicability> {
    if !is_applicable(state, action) {
        return Err(inapplicability(task, state, action));
    }
    Ok(progress_unchecked(state, action))
}

/// A step-level failure while applying a sequence.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {cause}")]
pub struct SequenceError {
    pub step: usize,
    pub cause: Inapplicability,
}

/// Applies the whole sequence from `init`, returning the full trace.
pub fn apply_sequence(task: &Task, init: &State, steps: &[ActionId]) -> Result<Trace, SequenceError> {
    let mut states = Vec::with_capacity(steps.len() + 1);
    states.push(init.clone());
    for (i, &aid) in steps.iter().enumerate() {
        let action = task.action(aid);
        let current = states.last().unwrap();
        if !is_applicable(current, action) {
            return Err(SequenceError { step: i, cause: inapplicability(task, current, action) });
        }
        let next = progress_unchecked(current, action);
        states.push(next);
    }
    Ok(Trace { states })
}

/// Outcome of checking a plan against a task.
#[derive(Clone, Debug)]
pub enum PlanCheck {
    Valid { cost: u64, trace: Trace },
    Inapplicable { step: usize, cause: Inapplicability },
    GoalUnsatisfied { missing: Vec<String>, cost: u64, trace: Trace },
}

impl PlanCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, PlanCheck::Valid { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            PlanCheck::Valid { cost, .. } => format!("valid, cost {cost}"),
            PlanCheck::Inapplicable { step, cause } => format!("inapplicable at step {step}: {cause}"),
            PlanCheck::GoalUnsatisfied { missing, .. } => {
                format!("goal unsatisfied: {}", missing.join(", "))
            }
        }
    }
}

/// Validates a plan: applicable throughout and goal satisfied at the end.
/// Cost is the sum of the named actions' costs, regardless of outcome kind.
pub fn validate_plan(task: &Task, steps: &[ActionId]) -> PlanCheck {
    let cost: u64 = steps.iter().map(|&a| u64::from(task.action(a).cost)).sum();
    match apply_sequence(task, task.init(), steps) {
        Err(e) => PlanCheck::Inapplicable { step: e.step, cause: e.cause },
        Ok(trace) => {
            let final_state = trace.final_state();
            if task.goal().is_subset(final_state) {
                PlanCheck::Valid { cost, trace }
            } else {
                let missing = task.set_names(&task.goal().difference(final_state));
                PlanCheck::GoalUnsatisfied { missing, cost, trace }
            }
        }
    }
}


#[cfg(test)]
mod tests {
    use super::test_tasks::two_fluent_task;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_fluent_task_is_valid() {
        let report = validate_task(&two_fluent_task());
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn add_del_overlap_reported() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        b.action("bad", &[], &[], &[x], &[x], 1);
        b.set_goal(&[x]);
        let task = b.build();
        let report = validate_task(&task);
        assert_eq!(
            report.violations,
            vec![Violation::AddDelOverlap { action: "bad".into(), fluent: "x".into() }]
        );
        assert!(report.to_string().contains("add/del overlap on x"));
    }

    #[test]
    fn goal_out_of_range_reported() {
        let mut b = TaskBuilder::new();
        b.fluent("x");
        let mut task_goal = FluentSet::new();
        task_goal.insert(FluentId::new(5));
        let task = Task::from_parts(
            vec![Fluent { id: FluentId::new(0), name: "x".into() }],
            vec![],
            State::new(),
            task_goal,
        );
        let report = validate_task(&task);
        assert_eq!(report.violations, vec![Violation::GoalOutOfRange { id: 5 }]);
    }

    #[test]
    fn applicability_on_worked_actions() {
        let task = two_fluent_task();
        let empty = State::new();
        let a1 = task.action(ActionId::new(0));
        let a2 = task.action(ActionId::new(1));
        assert!(is_applicable(&empty, a1));
        assert!(!is_applicable(&empty, a2));
        let with_x = State::from_ids([task.fluent_id("x").unwrap()]);
        assert!(is_applicable(&with_x, a2));
    }

    #[test]
    fn vacuous_preconditions_always_applicable() {
        let task = two_fluent_task();
        let a1 = task.action(ActionId::new(0));
        for state in [State::new(), State::from_ids([FluentId::new(0), FluentId::new(1)])] {
            assert!(is_applicable(&state, a1));
        }
    }

    #[test]
    fn progress_matches_semantics() {
        let task = two_fluent_task();
        let x = task.fluent_id("x").unwrap();
        let y = task.fluent_id("y").unwrap();
        let a1 = task.action(ActionId::new(0));
        let a2 = task.action(ActionId::new(1));

        let s1 = progress(&task, &State::new(), a1).unwrap();
        assert_eq!(s1, State::from_ids([x]));
        let s2 = progress(&task, &s1, a2).unwrap();
        assert_eq!(s2, State::from_ids([y]));

        let err = progress(&task, &State::new(), a2).unwrap_err();
        assert_eq!(err, Inapplicability::MissingPositive { action: "a2".into(), fluent: "x".into() });
    }

    #[test]
    fn negative_precondition_blocks_and_names_fluent() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let blocker = b.fluent("blocker");
        b.action("guarded", &[], &[blocker], &[x], &[], 1);
        b.set_init(&[blocker]);
        b.set_goal(&[x]);
        let task = b.build();
        let action = task.action(ActionId::new(0));
        assert!(!is_applicable(task.init(), action));
        let err = progress(&task, task.init(), action).unwrap_err();
        assert_eq!(
            err,
            Inapplicability::ForbiddenNegative { action: "guarded".into(), fluent: "blocker".into() }
        );
        assert!(is_applicable(&State::new(), action));
    }

    #[test]
    fn empty_effects_are_identity() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        b.action("noop", &[], &[], &[], &[], 1);
        b.set_init(&[x]);
        let task = b.build();
        let s = task.init().clone();
        let next = progress(&task, &s, task.action(ActionId::new(0))).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn apply_sequence_worked_plan() {
        let task = two_fluent_task();
        let steps = [ActionId::new(0), ActionId::new(1), ActionId::new(0)];
        let trace = apply_sequence(&task, task.init(), &steps).unwrap();
        assert_eq!(trace.states.len(), 4);
        let x = task.fluent_id("x").unwrap();
        let y = task.fluent_id("y").unwrap();
        assert_eq!(trace.final_state(), &State::from_ids([x, y]));
    }

    #[test]
    fn apply_sequence_empty_and_failing() {
        let task = two_fluent_task();
        let trace = apply_sequence(&task, task.init(), &[]).unwrap();
        assert_eq!(trace.states, vec![task.init().clone()]);

        let err = apply_sequence(&task, task.init(), &[ActionId::new(1)]).unwrap_err();
        assert_eq!(err.step, 0);
        assert!(err.to_string().contains("requires `x`"));
    }

    #[test]
    fn validate_plan_outcomes() {
        let task = two_fluent_task();
        let ok = validate_plan(&task, &[ActionId::new(0), ActionId::new(1), ActionId::new(0)]);
        match ok {
            PlanCheck::Valid { cost, .. } => assert_eq!(cost, 3),
            other => panic!("expected valid, got {}", other.describe()),
        }

        let short = validate_plan(&task, &[ActionId::new(0), ActionId::new(1)]);
        match short {
            PlanCheck::GoalUnsatisfied { missing, .. } => assert_eq!(missing, vec!["x".to_string()]),
            other => panic!("expected goal failure, got {}", other.describe()),
        }
    }

    #[test]
    fn empty_plan_valid_when_goal_initially_true() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        b.set_init(&[x]);
        b.set_goal(&[x]);
        let task = b.build();
        match validate_plan(&task, &[]) {
            PlanCheck::Valid { cost, .. } => assert_eq!(cost, 0),
            other => panic!("expected valid, got {}", other.describe()),
        }
    }

    proptest! {
        // Frame property: applying an action only adds `add` and removes at
        // most `del`; added fluents are present, deleted ones absent.
        #[test]
        fn progression_frame_property(seed in 0u64..500) {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            let mut state = task.init().clone();
            for action in task.actions() {
                if is_applicable(&state, action) {
                    let next = progress_unchecked(&state, action);
                    prop_assert!(next.difference(&action.add).is_subset(&state));
                    prop_assert!(action.add.is_subset(&next));
                    prop_assert!(!action.del.intersects(&next));
                    state = next;
                }
            }
        }

        // Applying π1·π2 step by step equals applying π1 then π2 from its end.
        #[test]
        fn apply_sequence_composes(seed in 0u64..200) {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            // Build some applicable prefix by greedy selection.
            let mut steps = Vec::new();
            let mut state = task.init().clone();
            'outer: for _ in 0..6 {
                for action in task.actions() {
                    if is_applicable(&state, action) {
                        state = progress_unchecked(&state, action);
                        steps.push(action.id);
                        continue 'outer;
                    }
                }
                break;
            }
            if steps.len() < 2 {
                return Ok(());
            }
            let split = steps.len() / 2;
            let whole = apply_sequence(&task, task.init(), &steps).unwrap();
            let first = apply_sequence(&task, task.init(), &steps[..split]).unwrap();
            let second = apply_sequence(&task, first.final_state(), &steps[split..]).unwrap();
            prop_assert_eq!(whole.final_state(), second.final_state());
            prop_assert_eq!(&whole.states[..=split], &first.states[..]);
        }
    }
}
