//! Instantiation of a lifted model into a ground [`Task`].
//!
//! Substitutions are enumerated per schema in lexicographic object-name
//! order, so grounding is deterministic. Static equality literals filter
//! substitutions; atoms that can never become true (no adder, not initial)
//! are removed, except goal atoms, which must survive so that an
//! unachievable goal stays unachievable rather than silently vanishing.

use std::collections::{HashMap, HashSet};

use super::model::*;
use super::PddlError;
use crate::strips::{Task, TaskBuilder};

#[derive(Clone, Debug)]
pub struct GroundingOptions {
    /// Also drop actions that can never fire under delete-relaxation
    /// reachability from the initial state. Off by default to keep
    /// grounding semantics-transparent.
    pub prune_unreachable: bool,
    /// Hard cap on the number of ground actions.
    pub max_actions: u64,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions { prune_unreachable: false, max_actions: 1_000_000 }
    }
}

struct GroundAction {
    name: String,
    pre_pos: Vec<GroundAtom>,
    pre_neg: Vec<GroundAtom>,
    add: Vec<GroundAtom>,
    del: Vec<GroundAtom>,
    cost: u32,
}

fn push_unique(list: &mut Vec<GroundAtom>, atom: GroundAtom) {
    if !list.contains(&atom) {
        list.push(atom);
    }
}

fn instantiate(schema: &ActionSchema, binding: &[ObjectId], model: &LiftedModel) -> Option<GroundAction> {
    let resolve = |term: Term| -> ObjectId {
        match term {
            Term::Param(i) => binding[i],
            Term::Object(o) => o,
        }
    };

    let mut pre_pos = Vec::new();
    let mut pre_neg = Vec::new();
    for literal in &schema.pre {
        match literal {
            PreLiteral::Equality { left, right, positive } => {
                // Static filter: equality is decided by the binding alone.
                if (resolve(*left) == resolve(*right)) != *positive {
                    return None;
                }
            }
            PreLiteral::Pred { pred, args, positive } => {
                let atom = GroundAtom { pred: *pred, args: args.iter().map(|&t| resolve(t)).collect() };
                if *positive {
                    push_unique(&mut pre_pos, atom);
                } else {
                    push_unique(&mut pre_neg, atom);
                }
            }
        }
    }
    // A fluent required both true and false can never fire.
    if pre_pos.iter().any(|a| pre_neg.contains(a)) {
        return None;
    }

    let mut add = Vec::new();
    for atom in &schema.add {
        push_unique(
            &mut add,
            GroundAtom { pred: atom.pred, args: atom.args.iter().map(|&t| resolve(t)).collect() },
        );
    }
    let mut del = Vec::new();
    for atom in &schema.del {
        let ground = GroundAtom { pred: atom.pred, args: atom.args.iter().map(|&t| resolve(t)).collect() };
        // PDDL add-wins semantics makes a delete of an added atom a no-op.
        if !add.contains(&ground) {
            push_unique(&mut del, ground);
        }
    }

    let mut name = schema.name.clone();
    for &obj in binding {
        name.push('_');
        name.push_str(model.object_name(obj));
    }
    Some(GroundAction { name, pre_pos, pre_neg, add, del, cost: schema.cost })
}

fn enumerate_schema(
    schema: &ActionSchema,
    model: &LiftedModel,
    candidates: &HashMap<TypeId, Vec<ObjectId>>,
    cap: u64,
    count: &mut u64,
    out: &mut Vec<GroundAction>,
) -> Result<(), PddlError> {
    let pools: Vec<&[ObjectId]> = schema
        .params
        .iter()
        .map(|(_, ty)| candidates.get(ty).map(|v| v.as_slice()).unwrap_or(&[]))
        .collect();
    if pools.iter().any(|p| p.is_empty()) && !schema.params.is_empty() {
        return Ok(());
    }
    let mut binding: Vec<ObjectId> = Vec::with_capacity(schema.params.len());
    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        pools: &[&[ObjectId]],
        binding: &mut Vec<ObjectId>,
        schema: &ActionSchema,
        model: &LiftedModel,
        cap: u64,
        count: &mut u64,
        out: &mut Vec<GroundAction>,
    ) -> Result<(), PddlError> {
        if depth == pools.len() {
            if let Some(action) = instantiate(schema, binding, model) {
                *count += 1;
                if *count > cap {
                    return Err(PddlError::TooManyActions { cap, reached: *count });
                }
                out.push(action);
            }
            return Ok(());
        }
        for &obj in pools[depth] {
            binding.push(obj);
            rec(depth + 1, pools, binding, schema, model, cap, count, out)?;
            binding.pop();
        }
        Ok(())
    }
    rec(0, &pools, &mut binding, schema, model, cap, count, out)
}

/// Grounds the model into a task.
pub fn ground(model: &LiftedModel, options: &GroundingOptions) -> Result<Task, PddlError> {
    // Candidate objects per type, sorted by name for lexicographic
    // substitution order.
    let mut used_types: HashSet<TypeId> = HashSet::new();
    for schema in &model.schemas {
        for (_, ty) in &schema.params {
            used_types.insert(*ty);
        }
    }
    let mut candidates: HashMap<TypeId, Vec<ObjectId>> = HashMap::new();
    for &ty in &used_types {
        let mut objs: Vec<ObjectId> = (0..model.objects.len())
            .map(ObjectId)
            .filter(|&o| model.types.is_subtype(model.objects[o.0].ty, ty))
            .collect();
        objs.sort_by(|&a, &b| model.object_name(a).cmp(model.object_name(b)));
        candidates.insert(ty, objs);
    }

    let mut actions: Vec<GroundAction> = Vec::new();
    let mut count: u64 = 0;
    for schema in &model.schemas {
        enumerate_schema(schema, model, &candidates, options.max_actions, &mut count, &mut actions)?;
    }

    // Atoms that can ever be true: initial or added by some action.
    let mut can_be_true: HashSet<GroundAtom> = model.init.iter().cloned().collect();
    for action in &actions {
        can_be_true.extend(action.add.iter().cloned());
    }
    let mut kept: Vec<GroundAction> = Vec::with_capacity(actions.len());
    for mut action in actions {
        if action.pre_pos.iter().any(|a| !can_be_true.contains(a)) {
            continue; // positively requires an atom that can never hold
        }
        action.pre_neg.retain(|a| can_be_true.contains(a));
        action.del.retain(|a| can_be_true.contains(a));
        kept.push(action);
    }

    if options.prune_unreachable {
        kept = prune_relaxed_unreachable(model, kept);
    }

    // Intern fluents in first-occurrence order: init, then per-action
    // atom lists, then goal.
    let mut builder = TaskBuilder::new();
    let mut names: HashMap<String, GroundAtom> = HashMap::new();
    let intern = |builder: &mut TaskBuilder,
                      names: &mut HashMap<String, GroundAtom>,
                      atom: &GroundAtom|
     -> Result<crate::strips::FluentId, PddlError> {
        let name = model.atom_name(atom);
        if let Some(existing) = names.get(&name) {
            if existing != atom {
                return Err(PddlError::NameCollision {
                    name,
                    kind: "ground atoms",
                });
            }
        } else {
            names.insert(name.clone(), atom.clone());
        }
        Ok(builder.fluent(&name))
    };

    let mut init_ids = Vec::new();
    for atom in &model.init {
        init_ids.push(intern(&mut builder, &mut names, atom)?);
    }

    let mut action_names: HashSet<String> = HashSet::new();
    let mut pending_actions = Vec::with_capacity(kept.len());
    for action in &kept {
        if !action_names.insert(action.name.clone()) {
            return Err(PddlError::NameCollision { name: action.name.clone(), kind: "ground actions" });
        }
        let mut resolve_all = |atoms: &[GroundAtom]| -> Result<Vec<crate::strips::FluentId>, PddlError> {
            atoms.iter().map(|a| intern(&mut builder, &mut names, a)).collect()
        };
        let pre_pos = resolve_all(&action.pre_pos)?;
        let pre_neg = resolve_all(&action.pre_neg)?;
        let add = resolve_all(&action.add)?;
        let del = resolve_all(&action.del)?;
        pending_actions.push((action.name.clone(), pre_pos, pre_neg, add, del, action.cost));
    }

    let mut goal_ids = Vec::new();
    for atom in &model.goal {
        goal_ids.push(intern(&mut builder, &mut names, atom)?);
    }

    for (name, pre_pos, pre_neg, add, del, cost) in pending_actions {
        builder.action(&name, &pre_pos, &pre_neg, &add, &del, cost);
    }
    builder.set_init(&init_ids);
    builder.set_goal(&goal_ids);
    let task = builder.build();

    let report = crate::strips::validate_task(&task);
    if !report.is_valid() {
        return Err(PddlError::Semantic { msg: format!("grounding produced an invalid task: {report}") });
    }
    Ok(task)
}

/// Delete-relaxation reachability: keep only actions that can fire in the
/// relaxed fixpoint from the initial state.
fn prune_relaxed_unreachable(model: &LiftedModel, actions: Vec<GroundAction>) -> Vec<GroundAction> {
    let mut reached: HashSet<GroundAtom> = model.init.iter().cloned().collect();
    let mut fired = vec![false; actions.len()];
    loop {
        let mut changed = false;
        for (i, action) in actions.iter().enumerate() {
            if fired[i] {
                continue;
            }
            if action.pre_pos.iter().all(|a| reached.contains(a)) {
                fired[i] = true;
                changed = true;
                for atom in &action.add {
                    reached.insert(atom.clone());
                }
            }
        }
        if !changed {
            break;
        }
    }
    actions
        .into_iter()
        .zip(fired)
        .filter_map(|(mut action, ok)| {
            if !ok {
                return None;
            }
            action.pre_neg.retain(|a| reached.contains(a));
            action.del.retain(|a| reached.contains(a));
            Some(action)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_pddl;

    fn fixture(name: &str) -> String {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
        std::fs::read_to_string(format!("{dir}/{name}")).unwrap()
    }

    #[test]
    fn parameterless_schema_grounds_to_one_action() {
        let domain = "(define (domain mini)
            (:predicates (done))
            (:action finish :parameters () :precondition (and) :effect (done)))";
        let problem = "(define (problem p) (:domain mini) (:init) (:goal (done)))";
        let model = parse_pddl(domain, problem).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(task.num_actions(), 1);
        assert_eq!(task.actions()[0].name, "finish");
    }

    #[test]
    fn one_parameter_three_objects_three_actions() {
        let domain = "(define (domain mini)
            (:requirements :strips :typing)
            (:types thing)
            (:predicates (seen ?t - thing) (goal-reached))
            (:action see :parameters (?t - thing) :precondition (and) :effect (seen ?t)))";
        let problem = "(define (problem p) (:domain mini)
            (:objects a b c - thing)
            (:init)
            (:goal (and (seen a) (seen b) (seen c))))";
        let model = parse_pddl(domain, problem).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(task.num_actions(), 3);
        let names: Vec<&str> = task.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["see_a", "see_b", "see_c"]);
    }

    #[test]
    fn domain_constants_participate_in_grounding() {
        let domain = "(define (domain depot)
            (:requirements :strips :typing)
            (:types place item)
            (:constants home - place)
            (:predicates (at ?i - item ?p - place))
            (:action stash :parameters (?i - item)
                :precondition (and) :effect (at ?i home)))";
        let problem = "(define (problem depot-1) (:domain depot)
            (:objects box - item)
            (:init)
            (:goal (at box home)))";
        let model = parse_pddl(domain, problem).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(task.num_actions(), 1);
        assert_eq!(task.actions()[0].name, "stash_box");
        assert_eq!(task.set_names(task.goal()), vec!["at_box_home"]);
    }

    #[test]
    fn gripper_fixture_matches_sidecar_counts() {
        let model = parse_pddl(&fixture("gripper-domain.pddl"), &fixture("gripper-problem.pddl")).unwrap();
        let sidecar: serde_json::Value =
            serde_json::from_str(&fixture("gripper-counts.json")).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(model.schemas.len() as u64, sidecar["schemas"].as_u64().unwrap());
        assert_eq!(task.num_actions() as u64, sidecar["ground_actions"].as_u64().unwrap());
    }

    #[test]
    fn gripper_task_solvable_and_costs_default_to_one() {
        let model = parse_pddl(&fixture("gripper-domain.pddl"), &fixture("gripper-problem.pddl")).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        assert!(task.actions().iter().all(|a| a.cost == 1));
        let result = crate::search::solve_optimal(&task, &crate::search::SearchLimits::default());
        // Move to roomb is not needed for b1 (already there): pick+drop for
        // b2 after moving; exact cost checked against the blind engine.
        let blind = crate::search::solve_optimal_with(
            &task,
            &crate::search::SearchLimits::default(),
            crate::search::OptimalHeuristic::Blind,
        );
        assert_eq!(result.cost(), blind.cost());
        assert!(result.is_solved());
    }

    #[test]
    fn action_cap_is_enforced() {
        let domain = "(define (domain wide)
            (:requirements :strips :typing)
            (:types thing)
            (:predicates (linked ?a ?b ?c - thing) (g))
            (:action link :parameters (?a ?b ?c - thing)
                :precondition (and) :effect (linked ?a ?b ?c)))";
        let problem = "(define (problem p) (:domain wide)
            (:objects t1 t2 t3 t4 t5 - thing) (:init) (:goal (g)))";
        let model = parse_pddl(domain, problem).unwrap();
        let err = ground(&model, &GroundingOptions { max_actions: 100, ..Default::default() })
            .unwrap_err();
        match err {
            PddlError::TooManyActions { cap, reached } => {
                assert_eq!(cap, 100);
                assert_eq!(reached, 101);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn never_true_atoms_removed_but_goal_atoms_survive() {
        let domain = "(define (domain mini)
            (:predicates (p) (q) (ghost) (unreachable-goal))
            (:action a :parameters () :precondition (p) :effect (q))
            (:action b :parameters () :precondition (ghost) :effect (p))
            (:action c :parameters () :precondition (and) :effect (and (p) (not (ghost)))))";
        let problem = "(define (problem p1) (:domain mini)
            (:init (p)) (:goal (and (q) (unreachable-goal))))";
        let model = parse_pddl(domain, problem).unwrap();
        let task = ground(&model, &GroundingOptions::default()).unwrap();
        // `ghost` is never addable and not initial: action b is dropped,
        // c's delete of it vanishes; the unachievable goal atom stays.
        assert_eq!(task.num_actions(), 2);
        assert!(task.fluent_id("ghost").is_none());
        assert!(task.fluent_id("unreachable-goal").is_some());
        let result = crate::search::solve_optimal(&task, &crate::search::SearchLimits::default());
        assert!(!result.is_solved(), "unachievable goal must make the task unsolvable");
    }

    #[test]
    fn relaxed_pruning_drops_cascading_dead_actions() {
        let domain = "(define (domain mini)
            (:predicates (p) (q) (r) (s))
            (:action mk-q :parameters () :precondition (p) :effect (q))
            (:action mk-r :parameters () :precondition (q) :effect (r))
            (:action mk-s :parameters () :precondition (and) :effect (s)))";
        let problem = "(define (problem p1) (:domain mini) (:init) (:goal (s)))";
        let model = parse_pddl(domain, problem).unwrap();
        let plain = ground(&model, &GroundingOptions::default()).unwrap();
        // One-pass filtering drops mk-q (p never true) but keeps mk-r,
        // because q occurs in an add effect of the dropped action.
        assert_eq!(plain.num_actions(), 2);
        let pruned = ground(
            &model,
            &GroundingOptions { prune_unreachable: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(pruned.num_actions(), 1);
        assert_eq!(pruned.actions()[0].name, "mk-s");
    }

    #[test]
    fn grounding_is_deterministic() {
        let model = parse_pddl(&fixture("gripper-domain.pddl"), &fixture("gripper-problem.pddl")).unwrap();
        let a = ground(&model, &GroundingOptions::default()).unwrap();
        let b = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(crate::jsonio::write_task_json(&a), crate::jsonio::write_task_json(&b));
    }
}
