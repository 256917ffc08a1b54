//! Plan files in the competition format: one parenthesized action name per
//! line, `;` comment lines, and an optional trailing cost comment such as
//! `; cost = 3 (unit cost)`.

use crate::strips::{ActionId, Plan, Task};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanFile {
    pub steps: Vec<String>,
    pub declared_cost: Option<u64>,
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum PlanFileError {
    #[error("line {line}: malformed plan step `{text}` (expected `(action-name)`)")]
    MalformedLine { line: usize, text: String },
    #[error("unknown action `{name}`")]
    UnknownAction { name: String },
}

fn parse_cost_comment(comment: &str) -> Option<u64> {
    let rest = comment.trim().strip_prefix("cost")?.trim_start();
    let rest = rest.strip_prefix('=')?.trim_start();
    let digits: &str = rest.split(|c: char| !c.is_ascii_digit()).next()?;
    if digits.is_empty() {
        return None;
    }
    let tail = rest[digits.len()..].trim();
    if !tail.is_empty() && !tail.starts_with('(') {
        return None;
    }
    digits.parse().ok()
}

pub fn parse_plan_file(text: &str) -> Result<PlanFile, PlanFileError> {
    let mut steps = Vec::new();
    let mut declared_cost = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix(';') {
            if let Some(cost) = parse_cost_comment(comment) {
                declared_cost = Some(cost);
            }
            continue;
        }
        let inner = line
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .map(str::trim)
            .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
            .ok_or_else(|| PlanFileError::MalformedLine { line: i + 1, text: raw.to_string() })?;
        steps.push(inner.to_string());
    }
    Ok(PlanFile { steps, declared_cost })
}

/// Resolves parsed step names against a task's action names.
pub fn resolve_steps(task: &Task, names: &[String]) -> Result<Vec<ActionId>, PlanFileError> {
    names
        .iter()
        .map(|n| task.action_id(n).ok_or_else(|| PlanFileError::UnknownAction { name: n.clone() }))
        .collect()
}

pub fn write_plan_file(task: &Task, plan: &Plan) -> String {
    let mut out = String::new();
    for &step in &plan.steps {
        out.push('(');
        out.push_str(&task.action(step).name);
        out.push_str(")\n");
    }
    let unit = plan.steps.iter().all(|&s| task.action(s).cost == 1);
    out.push_str(&format!(
        "; cost = {} ({} cost)\n",
        plan.cost,
        if unit { "unit" } else { "general" }
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::test_tasks::two_fluent_task;
    use crate::strips::Plan;

    #[test]
    fn parses_plan_with_cost_comment() {
        let parsed = parse_plan_file("(a1)\n(a2)\n(a1)\n; cost = 3 (unit cost)\n").unwrap();
        assert_eq!(parsed.steps, vec!["a1", "a2", "a1"]);
        assert_eq!(parsed.declared_cost, Some(3));
    }

    #[test]
    fn empty_file_is_empty_plan() {
        let parsed = parse_plan_file("").unwrap();
        assert!(parsed.steps.is_empty());
        assert_eq!(parsed.declared_cost, None);
    }

    #[test]
    fn missing_parentheses_rejected_with_line() {
        let err = parse_plan_file("a1\n").unwrap_err();
        assert_eq!(err, PlanFileError::MalformedLine { line: 1, text: "a1".into() });
        let err2 = parse_plan_file("(a1)\n(a2 b)\n").unwrap_err();
        assert!(matches!(err2, PlanFileError::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn comments_and_general_cost_accepted() {
        let parsed = parse_plan_file("; solver: whatever\n(a1)\n; cost = 12 (general cost)\n").unwrap();
        assert_eq!(parsed.steps, vec!["a1"]);
        assert_eq!(parsed.declared_cost, Some(12));
    }

    #[test]
    fn roundtrip_through_task() {
        let task = two_fluent_task();
        let plan = Plan::of(
            &task,
            vec![
                task.action_id("a1").unwrap(),
                task.action_id("a2").unwrap(),
                task.action_id("a1").unwrap(),
            ],
        );
        let text = write_plan_file(&task, &plan);
        let parsed = parse_plan_file(&text).unwrap();
        assert_eq!(parsed.declared_cost, Some(3));
        let ids = resolve_steps(&task, &parsed.steps).unwrap();
        assert_eq!(ids, plan.steps);
    }

    #[test]
    fn unknown_action_name_rejected() {
        let task = two_fluent_task();
        let err = resolve_steps(&task, &["nope".to_string()]).unwrap_err();
        assert_eq!(err, PlanFileError::UnknownAction { name: "nope".into() });
    }
}
