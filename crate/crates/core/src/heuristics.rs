//! Delete-relaxation heuristics.
//!
//! Both heuristics ignore delete effects and negative preconditions, which
//! keeps `h_max` admissible and consistent (ignoring negative preconditions
//! only relaxes the task further). A return of `None` means the goal is
//! unreachable even under the relaxation, hence unreachable in the real
//! task.

use crate::strips::{State, Task};

const INF: u64 = u64::MAX;

fn relaxed_fixpoint(task: &Task, state: &State, combine_max: bool) -> Vec<u64> {
    let mut cost = vec![INF; task.num_fluents()];
    for id in state.iter() {
        cost[id.index()] = 0;
    }
    loop {
        let mut changed = false;
        for action in task.actions() {
            let mut pre_cost: u64 = 0;
            let mut reachable = true;
            for id in action.pre_pos.iter() {
                let c = cost[id.index()];
                if c == INF {
                    reachable = false;
                    break;
                }
                pre_cost = if combine_max { pre_cost.max(c) } else { pre_cost.saturating_add(c) };
            }
            if !reachable {
                continue;
            }
            let through = pre_cost.saturating_add(u64::from(action.cost));
            for id in action.add.iter() {
                if through < cost[id.index()] {
                    cost[id.index()] = through;
                    changed = true;
                }
            }
        }
        if !changed {
            return cost;
        }
    }
}

fn goal_value(task: &Task, cost: &[u64], combine_max: bool) -> Option<u64> {
    let mut total: u64 = 0;
    for id in task.goal().iter() {
        let c = cost[id.index()];
        if c == INF {
            return None;
        }
        total = if combine_max { total.max(c) } else { total.saturating_add(c) };
    }
    Some(total)
}

/// Admissible and consistent max-combination relaxation heuristic.
/// `None` means the goal is delete-relaxation unreachable.
pub fn h_max(task: &Task, state: &State) -> Option<u64> {
    let cost = relaxed_fixpoint(task, state, true);
    goal_value(task, &cost, true)
}

/// Additive relaxation heuristic; pointwise at least `h_max`, not admissible.
pub fn h_add(task: &Task, state: &State) -> Option<u64> {
    let cost = relaxed_fixpoint(task, state, false);
    goal_value(task, &cost, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::test_tasks::two_fluent_task;
    use crate::strips::TaskBuilder;
    use proptest::prelude::*;

    #[test]
    fn zero_at_goal_states() {
        let task = two_fluent_task();
        let goal_state: State = task.goal().clone();
        assert_eq!(h_max(&task, &goal_state), Some(0));
        assert_eq!(h_add(&task, &goal_state), Some(0));
    }

    #[test]
    fn worked_example_values_from_init() {
        // Relaxed layers from {}: a1 gives x at 1; a2 then gives y at 2.
        // h_max = max(1, 2) = 2; h_add = 1 + 2 = 3.
        let task = two_fluent_task();
        assert_eq!(h_max(&task, task.init()), Some(2));
        assert_eq!(h_add(&task, task.init()), Some(3));
    }

    #[test]
    fn unreachable_goal_is_infinite() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let y = b.fluent("y");
        b.action("a", &[y], &[], &[x], &[], 1); // y has no adder
        b.set_goal(&[x]);
        let task = b.build();
        assert_eq!(h_max(&task, task.init()), None);
        assert_eq!(h_add(&task, task.init()), None);
    }

    #[test]
    fn negative_preconditions_ignored_by_relaxation() {
        let mut b = TaskBuilder::new();
        let x = b.fluent("x");
        let block = b.fluent("block");
        b.action("a", &[], &[block], &[x], &[], 1);
        b.set_init(&[block]);
        b.set_goal(&[x]);
        let task = b.build();
        // Really inapplicable from init, but the relaxation treats the
        // negative precondition as always satisfiable.
        assert_eq!(h_max(&task, task.init()), Some(1));
    }

    proptest! {
        #[test]
        fn hadd_dominates_hmax(seed in 0u64..300) {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            let hm = h_max(&task, task.init());
            let ha = h_add(&task, task.init());
            match (hm, ha) {
                (Some(m), Some(a)) => prop_assert!(a >= m),
                (None, None) => {}
                other => prop_assert!(false, "h_max and h_add disagree on reachability: {:?}", other),
            }
        }
    }
}
