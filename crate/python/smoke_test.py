#!/usr/bin/env python3
"""Smoke test for the commitplan_py extension module.

Builds nothing itself: run `cargo build -p commitplan-py --release` (or
debug) first. The script locates the compiled cdylib under target/,
exposes it as an importable module, and walks the core workflow: compile,
solve both tasks, map plans in both directions, and attribute goal
achievement.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libcommitplan_py.so", "commitplan_py.so", "libcommitplan_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not built; run `cargo build -p commitplan-py --release` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="commitplan_py_"))
    shutil.copy2(built, staging / "commitplan_py.so")
    sys.path.insert(0, str(staging))
    import commitplan_py

    return commitplan_py


def main():
    cp = import_extension()

    task_json = (REPO_ROOT / "crates/core/tests/fixtures/worked_example.json").read_text()
    task = cp.Task.from_json(task_json)
    assert task.num_fluents == 2 and task.num_actions == 2, repr(task)
    assert task.violations() == []
    assert cp.pending_goals(task) == ["x", "y"]

    compiled = cp.compile(task)
    assert compiled.task.num_actions == 4, repr(compiled)
    assert cp.forecast_size(task) == (4, 1)
    assert compiled.commit_fluents == {"x": "x--commit", "y": "y--commit"}
    variants = {name: variant for name, _base, variant, _c in compiled.provenance()}
    assert variants["a1--commit--x"] == "commit"
    assert variants["a2--sim--y"] == "simultaneous"

    base_result = cp.solve(task, engine="optimal")
    compiled_result = cp.solve(compiled.task, engine="optimal")
    assert base_result.outcome == "solved" and base_result.cost == 3, repr(base_result)
    assert compiled_result.outcome == "solved" and compiled_result.cost == 3

    valid, cost, _detail = task.validate_plan(base_result.plan)
    assert valid and cost == 3

    mapped, mapping_json = cp.forward_map(task, base_result.plan, compiled)
    assert mapped == ["a1", "a2--sim--y", "a1--commit--x"], mapped
    mapping = json.loads(mapping_json)
    assert mapping["format"] == "plan-mapping/1" and mapping["cost"] == 3
    assert mapping["commit_points"] == {"x": 2, "y": 1}

    back, _ = cp.backward_map(task, compiled, mapped)
    assert back == ["a1", "a2", "a1"], back
    assert cp.commit_achievers(compiled, mapped) == {"x": 2, "y": 1}

    report = json.loads(task.analyze(back))
    achievers = {g["goal"]: g["achiever"] for g in report["goals"]}
    assert achievers == {"x": {"step": 2}, "y": {"step": 1}}, achievers

    # PDDL surface: emit, re-ingest, same optimum.
    domain_text, problem_text = task.to_pddl()
    reparsed = cp.Task.from_pddl(domain_text, problem_text)
    assert cp.solve(reparsed).cost == 3

    # Random instances stay deterministic under the seed.
    g1, g2 = cp.generate_task(99), cp.generate_task(99)
    assert g1.to_json() == g2.to_json()

    assert cp.sat_score(3, 4) == 0.75 and cp.sat_score(3, None) == 0.0
    assert cp.agl_score(900.0) == 0.0 and cp.agl_score(0.5) == 1.0

    print("smoke test: OK")


if __name__ == "__main__":
    main()
