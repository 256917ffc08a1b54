//! Emission of a ground task as PDDL with 0-ary predicates.
//!
//! Fluent and action names that are not valid PDDL identifiers are mangled
//! deterministically; every rename is recorded in the returned
//! [`NamingContext`] and collisions after mangling are hard errors.
//! Parsing and grounding the emission reproduces an isomorphic task.

use std::collections::HashMap;

use super::PddlError;
use crate::strips::Task;

#[derive(Clone, Debug)]
pub struct EmitOptions {
    pub domain_name: String,
    pub problem_name: String,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions { domain_name: "ground".into(), problem_name: "ground-1".into() }
    }
}

/// Bidirectional record of the names used in an emission.
#[derive(Clone, Debug, Default)]
pub struct NamingContext {
    fluent_to_emitted: HashMap<String, String>,
    emitted_to_fluent: HashMap<String, String>,
    action_to_emitted: HashMap<String, String>,
    emitted_to_action: HashMap<String, String>,
}

impl NamingContext {
    pub fn emitted_fluent(&self, original: &str) -> Option<&str> {
        self.fluent_to_emitted.get(original).map(String::as_str)
    }

    pub fn emitted_action(&self, original: &str) -> Option<&str> {
        self.action_to_emitted.get(original).map(String::as_str)
    }

    pub fn original_action(&self, emitted: &str) -> Option<&str> {
        self.emitted_to_action.get(emitted).map(String::as_str)
    }

    /// True if any name had to be rewritten.
    pub fn mangled_any(&self) -> bool {
        self.fluent_to_emitted.iter().any(|(k, v)| k != v)
            || self.action_to_emitted.iter().any(|(k, v)| k != v)
    }
}

/// Words with structural meaning in the emitted grammar; a fluent or
/// action carrying one of these names must be renamed.
const RESERVED: [&str; 5] = ["and", "not", "increase", "=", "total-cost"];

fn is_pddl_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

/// Deterministic mangling: invalid characters become `-`; names that do
/// not start with a letter, or that land on a reserved word, get a kind
/// prefix.
fn emitted_name(name: &str, prefix: &str) -> String {
    if is_pddl_identifier(name) && !RESERVED.contains(&name) {
        return name.to_string();
    }
    let mut out: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect();
    if !out.starts_with(|c: char| c.is_ascii_lowercase()) || RESERVED.contains(&out.as_str()) {
        out = format!("{prefix}-{out}");
    }
    out
}

pub struct PddlEmission {
    pub domain: String,
    pub problem: String,
    pub naming: NamingContext,
}

/// Emits a task as grounded PDDL (all predicates 0-ary). Declares
/// `:negative-preconditions` only if some action has one, and
/// `:action-costs` only if some cost differs from 1.
pub fn emit_pddl(task: &Task, options: &EmitOptions) -> Result<PddlEmission, PddlError> {
    let report = crate::strips::validate_task(task);
    if !report.is_valid() {
        return Err(PddlError::Semantic { msg: format!("cannot emit an invalid task: {report}") });
    }

    let mut naming = NamingContext::default();
    for fluent in task.fluents() {
        let emitted = emitted_name(&fluent.name, "f");
        if let Some(other) = naming.emitted_to_fluent.get(&emitted) {
            return Err(PddlError::EmitCollision {
                emitted,
                first: other.clone(),
                second: fluent.name.clone(),
            });
        }
        naming.emitted_to_fluent.insert(emitted.clone(), fluent.name.clone());
        naming.fluent_to_emitted.insert(fluent.name.clone(), emitted);
    }
    for action in task.actions() {
        let emitted = emitted_name(&action.name, "a");
        if let Some(other) = naming.emitted_to_action.get(&emitted) {
            return Err(PddlError::EmitCollision {
                emitted,
                first: other.clone(),
                second: action.name.clone(),
            });
        }
        naming.emitted_to_action.insert(emitted.clone(), action.name.clone());
        naming.action_to_emitted.insert(action.name.clone(), emitted);
    }

    let fname = |id: crate::strips::FluentId| -> &str {
        naming.fluent_to_emitted[task.fluent_name(id)].as_str()
    };

    let any_negative = task.actions().iter().any(|a| !a.pre_neg.is_empty());
    let with_costs = task.actions().iter().any(|a| a.cost != 1);

    let mut domain = String::new();
    domain.push_str(&format!("(define (domain {})\n", options.domain_name));
    domain.push_str("  (:requirements :strips");
    if any_negative {
        domain.push_str(" :negative-preconditions");
    }
    if with_costs {
        domain.push_str(" :action-costs");
    }
    domain.push_str(")\n");

    domain.push_str("  (:predicates");
    if task.num_fluents() == 0 {
        domain.push_str(")\n");
    } else {
        domain.push('\n');
        for fluent in task.fluents() {
            domain.push_str(&format!("    ({})\n", naming.fluent_to_emitted[&fluent.name]));
        }
        domain.push_str("  )\n");
    }
    if with_costs {
        domain.push_str("  (:functions (total-cost))\n");
    }

    for action in task.actions() {
        domain.push_str(&format!("  (:action {}\n", naming.action_to_emitted[&action.name]));
        domain.push_str("    :parameters ()\n");
        domain.push_str("    :precondition (and");
        for id in action.pre_pos.iter() {
            domain.push_str(&format!(" ({})", fname(id)));
        }
        for id in action.pre_neg.iter() {
            domain.push_str(&format!(" (not ({}))", fname(id)));
        }
        domain.push_str(")\n");
        domain.push_str("    :effect (and");
        for id in action.add.iter() {
            domain.push_str(&format!(" ({})", fname(id)));
        }
        for id in action.del.iter() {
            domain.push_str(&format!(" (not ({}))", fname(id)));
        }
        if with_costs {
            domain.push_str(&format!(" (increase (total-cost) {})", action.cost));
        }
        domain.push_str(")\n  )\n");
    }
    domain.push_str(")\n");

    let mut problem = String::new();
    problem.push_str(&format!("(define (problem {})\n", options.problem_name));
    problem.push_str(&format!("  (:domain {})\n", options.domain_name));
    problem.push_str("  (:init");
    for id in task.init().iter() {
        problem.push_str(&format!(" ({})", fname(id)));
    }
    if with_costs {
        problem.push_str(" (= (total-cost) 0)");
    }
    problem.push_str(")\n");
    problem.push_str("  (:goal (and");
    for id in task.goal().iter() {
        problem.push_str(&format!(" ({})", fname(id)));
    }
    problem.push_str("))\n");
    if with_costs {
        problem.push_str("  (:metric minimize (total-cost))\n");
    }
    problem.push_str(")\n");

    Ok(PddlEmission { domain, problem, naming })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile, CompileOptions};
    use crate::pddl::{ground, parse_pddl, GroundingOptions};
    use crate::strips::test_tasks::two_fluent_task;
    use std::collections::BTreeMap;

    /// Structural comparison under the identity name mapping: same fluent
    /// name set, and per action name the same pre/add/del name sets, cost,
    /// init, and goal.
    pub(crate) fn isomorphic(a: &Task, b: &Task) -> bool {
        let sorted = |task: &Task, set: &crate::bitset::FluentSet| -> Vec<String> {
            let mut names = task.set_names(set);
            names.sort();
            names
        };
        type Sig = (Vec<String>, BTreeMap<String, Vec<Vec<String>>>, Vec<String>, Vec<String>);
        let sig = |task: &Task| -> Sig {
            let mut fluents: Vec<String> = task.fluents().iter().map(|f| f.name.clone()).collect();
            fluents.sort();
            let actions = task
                .actions()
                .iter()
                .map(|act| {
                    (
                        act.name.clone(),
                        vec![
                            sorted(task, &act.pre_pos),
                            sorted(task, &act.pre_neg),
                            sorted(task, &act.add),
                            sorted(task, &act.del),
                            vec![act.cost.to_string()],
                        ],
                    )
                })
                .collect();
            (fluents, actions, sorted(task, task.init()), sorted(task, task.goal()))
        };
        sig(a) == sig(b)
    }

    #[test]
    fn worked_example_compiled_emission() {
        let task = two_fluent_task();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        let emission = emit_pddl(&compiled.task, &EmitOptions::default()).unwrap();
        assert!(emission.domain.contains(":negative-preconditions"));
        assert!(!emission.domain.contains(":action-costs"), "unit costs stay implicit");
        assert_eq!(emission.domain.matches("(:action ").count(), 4);
        assert!(emission.problem.contains("(:goal (and (x--commit) (y--commit)))"));
        assert!(!emission.naming.mangled_any());
    }

    #[test]
    fn unit_cost_task_omits_action_costs() {
        let task = two_fluent_task();
        let emission = emit_pddl(&task, &EmitOptions::default()).unwrap();
        assert!(!emission.domain.contains(":action-costs"));
        assert!(!emission.domain.contains("total-cost"));
        assert!(!emission.problem.contains("metric"));
    }

    #[test]
    fn emission_reparses_isomorphically() {
        let task = two_fluent_task();
        let compiled = compile(&task, &CompileOptions::default()).unwrap();
        for t in [&task, &compiled.task] {
            let emission = emit_pddl(t, &EmitOptions::default()).unwrap();
            let model = parse_pddl(&emission.domain, &emission.problem).unwrap();
            let back = ground(&model, &GroundingOptions::default()).unwrap();
            assert!(isomorphic(t, &back), "emission must reproduce the task");
        }
    }

    #[test]
    fn mangling_is_recorded_and_collisions_error() {
        let mut b = crate::strips::TaskBuilder::new();
        let weird = b.fluent("p(a,b)");
        b.action("do!", &[], &[], &[weird], &[], 1);
        b.set_goal(&[weird]);
        let task = b.build();
        let emission = emit_pddl(&task, &EmitOptions::default()).unwrap();
        assert_eq!(emission.naming.emitted_fluent("p(a,b)"), Some("p-a-b-"));
        assert_eq!(emission.naming.emitted_action("do!"), Some("do-"));
        assert!(emission.naming.mangled_any());

        let mut b = crate::strips::TaskBuilder::new();
        let f1 = b.fluent("p(a");
        let f2 = b.fluent("p-a");
        b.action("a", &[], &[], &[f1, f2], &[], 1);
        b.set_goal(&[f1]);
        let collide = b.build();
        assert!(matches!(
            emit_pddl(&collide, &EmitOptions::default()),
            Err(PddlError::EmitCollision { .. })
        ));
    }

    #[test]
    fn reserved_words_are_renamed_and_reparse() {
        let mut b = crate::strips::TaskBuilder::new();
        let f_not = b.fluent("not");
        let f_cost = b.fluent("total-cost");
        b.action("and", &[], &[f_cost], &[f_not], &[], 1);
        b.set_init(&[f_cost]);
        b.set_goal(&[f_not]);
        let task = b.build();
        let emission = emit_pddl(&task, &EmitOptions::default()).unwrap();
        assert_eq!(emission.naming.emitted_fluent("not"), Some("f-not"));
        assert_eq!(emission.naming.emitted_fluent("total-cost"), Some("f-total-cost"));
        assert_eq!(emission.naming.emitted_action("and"), Some("a-and"));
        let model = parse_pddl(&emission.domain, &emission.problem).unwrap();
        let back = ground(&model, &GroundingOptions::default()).unwrap();
        assert_eq!(back.num_fluents(), task.num_fluents());
        assert_eq!(back.num_actions(), task.num_actions());
    }

    #[test]
    fn random_tasks_roundtrip_isomorphically() {
        for seed in 0..60 {
            let params = crate::taskgen::GenParams { seed, ..Default::default() };
            let task = crate::taskgen::generate(&params);
            let emission = emit_pddl(&task, &EmitOptions::default()).unwrap();
            let model = parse_pddl(&emission.domain, &emission.problem).unwrap();
            let back = ground(&model, &GroundingOptions::default()).unwrap();
            assert!(isomorphic(&task, &back), "seed {seed}");
        }
    }
}
