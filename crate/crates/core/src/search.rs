//! Deterministic state-space search: optimal A* / uniform-cost and greedy
//! best-first, plus exhaustive reachability enumeration.
//!
//! Determinism contract: ties in the open list break on lower f, then lower
//! h, then FIFO insertion order; successors are generated in ascending
//! action id order. Two runs on identical inputs produce identical plans
//! and statistics (modulo wall time).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use crate::heuristics::{h_add, h_max};
use crate::strips::{is_applicable, progress_unchecked, ActionId, Plan, State, Task};

/// Resource guards for a single search run. Absent fields mean unlimited.
#[derive(Clone, Debug, Default)]
pub struct SearchLimits {
    pub time: Option<Duration>,
    /// Cap on distinct stored states (closed + frontier nodes).
    pub max_states: Option<usize>,
    pub max_expansions: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Time,
    States,
    Expansions,
}

impl LimitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitKind::Time => "time",
            LimitKind::States => "states",
            LimitKind::Expansions => "expansions",
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Solved(Plan),
    Unsolvable,
    Limit(LimitKind),
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub expansions: u64,
    pub generations: u64,
    pub wall: Duration,
    pub peak_states: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.outcome {
            SearchOutcome::Solved(plan) => Some(plan),
            _ => None,
        }
    }

    pub fn cost(&self) -> Option<u64> {
        self.plan().map(|p| p.cost)
    }

    pub fn is_solved(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Solved(_))
    }
}

/// Heuristic choices for the optimal engine. Both are consistent, so the
/// first expansion of a state is already optimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimalHeuristic {
    Blind,
    HMax,
}

struct Node {
    state: State,
    g: u64,
    parent: Option<(usize, ActionId)>,
    closed: bool,
}

/// Open-list entry. `Reverse` of the natural tuple order yields:
/// lower f first, then lower h, then earlier insertion.
type OpenEntry = Reverse<(u64, u64, u64, usize)>;

struct Engine<'a> {
    task: &'a Task,
    limits: &'a SearchLimits,
    start: Instant,
    nodes: Vec<Node>,
    index: HashMap<State, usize>,
    open: BinaryHeap<OpenEntry>,
    seq: u64,
    stats: SearchStats,
}

impl<'a> Engine<'a> {
    fn new(task: &'a Task, limits: &'a SearchLimits) -> Self {
        Engine {
            task,
            limits,
            start: Instant::now(),
            nodes: Vec::new(),
            index: HashMap::new(),
            open: BinaryHeap::new(),
            seq: 0,
            stats: SearchStats::default(),
        }
    }

    fn tripped_limit(&mut self) -> Option<LimitKind> {
        if let Some(cap) = self.limits.max_expansions {
            if self.stats.expansions >= cap {
                return Some(LimitKind::Expansions);
            }
        }
        if let Some(cap) = self.limits.max_states {
            if self.nodes.len() >= cap {
                return Some(LimitKind::States);
            }
        }
        if let Some(t) = self.limits.time {
            // Clock checks amortized over expansions.
            if self.stats.expansions.is_multiple_of(256) && self.start.elapsed() >= t {
                return Some(LimitKind::Time);
            }
        }
        None
    }

    fn extract_plan(&self, mut node: usize) -> Plan {
        let mut steps = Vec::new();
        while let Some((parent, action)) = self.nodes[node].parent {
            steps.push(action);
            node = parent;
        }
        steps.reverse();
        Plan::of(self.task, steps)
    }

    fn finish(mut self, outcome: SearchOutcome) -> SearchResult {
        self.stats.wall = self.start.elapsed();
        self.stats.peak_states = self.nodes.len();
        SearchResult { outcome, stats: self.stats }
    }

    fn push_open(&mut self, f: u64, h: u64, node: usize) {
        self.open.push(Reverse((f, h, self.seq, node)));
        self.seq += 1;
    }
}

/// Optimal search: A* under a consistent heuristic (or uniform-cost when
/// blind). Duplicate detection keys on the full state; a cheaper path to a
/// known state reopens it, which keeps the search correct even under
/// inconsistent heuristics and zero-cost actions.
pub fn solve_optimal_with(task: &Task, limits: &SearchLimits, heuristic: OptimalHeuristic) -> SearchResult {
    let h = |state: &State| -> Option<u64> {
        match heuristic {
            OptimalHeuristic::Blind => Some(0),
            OptimalHeuristic::HMax => h_max(task, state),
        }
    };
    let mut engine = Engine::new(task, limits);

    let init = task.init().clone();
    let Some(h0) = h(&init) else {
        return engine.finish(SearchOutcome::Unsolvable);
    };
    engine.nodes.push(Node { state: init.clone(), g: 0, parent: None, closed: false });
    engine.index.insert(init, 0);
    engine.push_open(h0, h0, 0);

    while let Some(Reverse((_f, _h, _seq, node_idx))) = engine.open.pop() {
        // Lazy deletion: entries made stale by a cheaper path (or an
        // earlier expansion) find their node already closed and are
        // skipped; reopened nodes cleared the flag when improved.
        if engine.nodes[node_idx].closed {
            continue;
        }
        engine.nodes[node_idx].closed = true;
        let (g, state) = {
            let node = &engine.nodes[node_idx];
            (node.g, node.state.clone())
        };

        if task.goal().is_subset(&state) {
            let plan = engine.extract_plan(node_idx);
            return engine.finish(SearchOutcome::Solved(plan));
        }

        if let Some(kind) = engine.tripped_limit() {
            return engine.finish(SearchOutcome::Limit(kind));
        }
        engine.stats.expansions += 1;

        for action in task.actions() {
            if !is_applicable(&state, action) {
                continue;
            }
            let succ = progress_unchecked(&state, action);
            let succ_g = g + u64::from(action.cost);
            engine.stats.generations += 1;

            match engine.index.get(&succ).copied() {
                Some(existing) => {
                    if succ_g < engine.nodes[existing].g {
                        engine.nodes[existing].g = succ_g;
                        engine.nodes[existing].parent = Some((node_idx, action.id));
                        engine.nodes[existing].closed = false; // reopen
                        let Some(hv) = h(&succ) else { continue };
                        engine.push_open(succ_g + hv, hv, existing);
                    }
                }
                None => {
                    let Some(hv) = h(&succ) else { continue };
                    let idx = engine.nodes.len();
                    engine.nodes.push(Node {
                        state: succ.clone(),
                        g: succ_g,
                        parent: Some((node_idx, action.id)),
                        closed: false,
                    });
                    engine.index.insert(succ, idx);
                    engine.push_open(succ_g + hv, hv, idx);
                }
            }
        }
    }
    engine.finish(SearchOutcome::Unsolvable)
}

/// Optimal search with the default admissible heuristic.
pub fn solve_optimal(task: &Task, limits: &SearchLimits) -> SearchResult {
    solve_optimal_with(task, limits, OptimalHeuristic::HMax)
}

/// Greedy best-first search on the additive relaxation heuristic. Finds
/// some valid plan fast; makes no optimality claim. Complete on finite
/// state spaces: frontier exhaustion proves unsolvability.
pub fn solve_greedy(task: &Task, limits: &SearchLimits) -> SearchResult {
    let mut engine = Engine::new(task, limits);

    let init = task.init().clone();
    let Some(h0) = h_add(task, &init) else {
        return engine.finish(SearchOutcome::Unsolvable);
    };
    engine.nodes.push(Node { state: init.clone(), g: 0, parent: None, closed: false });
    engine.index.insert(init, 0);
    engine.push_open(h0, h0, 0);

    while let Some(Reverse((_hv, _, _seq, node_idx))) = engine.open.pop() {
        if engine.nodes[node_idx].closed {
            continue;
        }
        engine.nodes[node_idx].closed = true;
        let state = engine.nodes[node_idx].state.clone();

        if task.goal().is_subset(&state) {
            let plan = engine.extract_plan(node_idx);
            return engine.finish(SearchOutcome::Solved(plan));
        }

        if let Some(kind) = engine.tripped_limit() {
            return engine.finish(SearchOutcome::Limit(kind));
        }
        engine.stats.expansions += 1;

        for action in task.actions() {
            if !is_applicable(&state, action) {
                continue;
            }
            let succ = progress_unchecked(&state, action);
            engine.stats.generations += 1;
            if engine.index.contains_key(&succ) {
                continue; // first visit wins
            }
            let Some(hv) = h_add(task, &succ) else { continue };
            let idx = engine.nodes.len();
            engine.nodes.push(Node {
                state: succ.clone(),
                g: 0,
                parent: Some((node_idx, action.id)),
                closed: false,
            });
            engine.index.insert(succ, idx);
            engine.push_open(hv, hv, idx);
        }
    }
    engine.finish(SearchOutcome::Unsolvable)
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
#[error("reachable state count exceeds cap of {cap}")]
pub struct ReachabilityCapExceeded {
    pub cap: usize,
}

/// Breadth-first enumeration of every state reachable from the initial
/// state. Oracle-grade: no pruning beyond duplicate detection.
pub fn enumerate_reachable(task: &Task, cap: usize) -> Result<HashSet<State>, ReachabilityCapExceeded> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    seen.insert(task.init().clone());
    queue.push_back(task.init().clone());
    while let Some(state) = queue.pop_front() {
        for action in task.actions() {
            if !is_applicable(&state, action) {
                continue;
            }
            let succ = progress_unchecked(&state, action);
            if !seen.contains(&succ) {
                if seen.len() >= cap {
                    return Err(ReachabilityCapExceeded { cap });
                }
                seen.insert(succ.clone());
                queue.push_back(succ);
            }
        }
    }
    Ok(seen)
}
