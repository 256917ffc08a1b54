//! Whole-pipeline runs over the realistic fixtures: lifted PDDL in,
//! grounding, compilation, optimal search on both variants, and plan
//! translation back and forth.

use commitplan::compile::{compile, CompileOptions, Variant};
use commitplan::jsonio::{read_compiled_json, read_task_json, write_compiled_json};
use commitplan::pddl::{ground, parse_pddl, GroundingOptions};
use commitplan::planmap::{backward_map, forward_map};
use commitplan::search::{solve_optimal, solve_optimal_with, OptimalHeuristic, SearchLimits};
use commitplan::strips::validate_plan;

fn fixture(name: &str) -> String {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    std::fs::read_to_string(format!("{dir}/{name}")).unwrap()
}

#[test]
fn gripper_grounds_compiles_and_preserves_optimal_cost() {
    let model =
        parse_pddl(&fixture("gripper-domain.pddl"), &fixture("gripper-problem.pddl")).unwrap();
    let task = ground(&model, &GroundingOptions::default()).unwrap();
    let compiled = compile(&task, &CompileOptions::default()).unwrap();

    // Both balls start away from their goal room, so both goals are
    // pending; picking a ball back up deletes a goal, so the compilation
    // exercises commit and forcecommit variants on real structure.
    assert_eq!(compiled.pending.len(), 2);
    let variants: Vec<Variant> = compiled.provenance.iter().map(|p| p.variant).collect();
    assert!(variants.contains(&Variant::Commit));
    assert!(variants.contains(&Variant::ForceCommit));
    assert!(variants.contains(&Variant::Unchanged));

    let limits = SearchLimits::default();
    let base = solve_optimal(&task, &limits);
    let comp = solve_optimal(&compiled.task, &limits);
    assert_eq!(base.cost(), comp.cost());
    let blind = solve_optimal_with(&compiled.task, &limits, OptimalHeuristic::Blind);
    assert_eq!(blind.cost(), comp.cost());

    let plan = base.plan().unwrap();
    let fwd = forward_map(&task, plan, &compiled).unwrap();
    assert!(validate_plan(&compiled.task, &fwd.plan.steps).is_valid());
    assert_eq!(fwd.plan.cost, plan.cost);
    let back = backward_map(&task, &compiled, &fwd.plan).unwrap();
    assert_eq!(&back.plan, plan);
}

#[test]
fn pushing_fixture_compiles_through_json_roundtrip() {
    let task = read_task_json(&fixture("sokoban_two_agents.json")).unwrap();
    let compiled = compile(&task, &CompileOptions::default()).unwrap();

    // One unchanged push, two commit-capable pushes, one simultaneous
    // push that trades one goal cell for the other.
    assert_eq!(compiled.task.num_actions(), 7);
    let limits = SearchLimits::default();
    assert_eq!(solve_optimal(&task, &limits).cost(), Some(4));
    assert_eq!(solve_optimal(&compiled.task, &limits).cost(), Some(4));

    // Provenance survives serialization and still maps plans.
    let reread = read_compiled_json(&write_compiled_json(&compiled)).unwrap();
    let plan = solve_optimal(&task, &limits);
    let fwd = forward_map(&task, plan.plan().unwrap(), &reread).unwrap();
    let back = backward_map(&task, &reread, &fwd.plan).unwrap();
    assert_eq!(Some(&back.plan), plan.plan());
}
