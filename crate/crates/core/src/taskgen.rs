//! Seeded random generation of small valid STRIPS tasks.
//!
//! Instances are deliberately tiny so that exhaustive reachability and blind
//! optimal search stay tractable as oracles. Solvability is NOT guaranteed;
//! unsolvable instances are wanted to exercise solvability equivalence in
//! both directions.

use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::strips::{FluentId, Task, TaskBuilder};

/// Generator parameters. Generation is a pure function of this struct,
/// seed included.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub fluents: RangeInclusive<usize>,
    pub actions: RangeInclusive<usize>,
    pub max_pre: usize,
    pub max_add: usize,
    pub max_del: usize,
    pub neg_pre_prob: f64,
    pub goals: RangeInclusive<usize>,
    pub goal_init_prob: f64,
    pub costs: RangeInclusive<u32>,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            fluents: 3..=8,
            actions: 2..=8,
            max_pre: 2,
            max_add: 2,
            max_del: 2,
            neg_pre_prob: 0.25,
            goals: 1..=3,
            goal_init_prob: 0.15,
            costs: 0..=3,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.fluents.is_empty() || self.actions.is_empty() || self.goals.is_empty() || self.costs.is_empty() {
            return Err("all ranges must be nonempty".into());
        }
        for (name, p) in [("neg_pre_prob", self.neg_pre_prob), ("goal_init_prob", self.goal_init_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        Ok(())
    }
}

fn sample_subset(rng: &mut ChaCha8Rng, pool: &[FluentId], max_size: usize) -> Vec<FluentId> {
    if pool.is_empty() || max_size == 0 {
        return Vec::new();
    }
    let size = rng.random_range(0..=max_size.min(pool.len()));
    let mut picked = Vec::with_capacity(size);
    let mut candidates: Vec<FluentId> = pool.to_vec();
    for _ in 0..size {
        let i = rng.random_range(0..candidates.len());
        picked.push(candidates.swap_remove(i));
    }
    picked.sort();
    picked
}

/// Generates a task. The result always passes `validate_task`: add/del
/// disjointness and pre⁺/pre⁻ disjointness hold by construction.
///
/// Preconditions and deletes are drawn from fluents that are addable or
/// initially true, so generated tasks are stable under grounding's
/// removal of never-true atoms; goal fluents are exempt, which keeps
/// unsolvable instances (goals with no adder) in the mix.
///
/// Panics if `params.validate()` fails.
pub fn generate(params: &GenParams) -> Task {
    params.validate().expect("invalid generator parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut b = TaskBuilder::new();

    let n_fluents = rng.random_range(params.fluents.clone());
    let all: Vec<FluentId> = (0..n_fluents).map(|i| b.fluent(&format!("f{i}"))).collect();

    let n_actions = rng.random_range(params.actions.clone());
    let adds: Vec<Vec<FluentId>> =
        (0..n_actions).map(|_| sample_subset(&mut rng, &all, params.max_add)).collect();
    let costs: Vec<u32> =
        (0..n_actions).map(|_| rng.random_range(params.costs.clone())).collect();

    let n_goals = rng.random_range(params.goals.clone()).min(n_fluents);
    let goal = sample_subset(&mut rng, &all, n_goals.max(1)).into_iter().take(n_goals).collect::<Vec<_>>();
    let mut init = Vec::new();
    for &g in &goal {
        if rng.random_bool(params.goal_init_prob) {
            init.push(g);
        }
    }

    let mut supported: Vec<FluentId> = adds.iter().flatten().chain(&init).copied().collect();
    supported.sort();
    supported.dedup();

    let mut actions = Vec::with_capacity(n_actions);
    for (i, add) in adds.iter().enumerate() {
        let pre_pos = sample_subset(&mut rng, &supported, params.max_pre);
        let neg_pool: Vec<FluentId> =
            supported.iter().copied().filter(|f| !pre_pos.contains(f)).collect();
        let pre_neg = if rng.random_bool(params.neg_pre_prob) {
            sample_subset(&mut rng, &neg_pool, 1)
        } else {
            Vec::new()
        };
        let del_pool: Vec<FluentId> =
            supported.iter().copied().filter(|f| !add.contains(f)).collect();
        let del = sample_subset(&mut rng, &del_pool, params.max_del);
        actions.push((pre_pos, pre_neg, add.clone(), del, costs[i]));
    }

    // Drop fluents nothing ever mentions, so the universe holds no
    // never-true leftovers.
    let mut used: Vec<bool> = vec![false; n_fluents];
    let mark = |used: &mut Vec<bool>, ids: &[FluentId]| {
        for id in ids {
            used[id.index()] = true;
        }
    };
    for (pre_pos, pre_neg, add, del, _) in &actions {
        mark(&mut used, pre_pos);
        mark(&mut used, pre_neg);
        mark(&mut used, add);
        mark(&mut used, del);
    }
    mark(&mut used, &init);
    mark(&mut used, &goal);

    let mut out = TaskBuilder::new();
    let remap: Vec<Option<FluentId>> = (0..n_fluents)
        .map(|i| used[i].then(|| out.fluent(&format!("f{i}"))))
        .collect();
    let remap_all =
        |ids: &[FluentId]| -> Vec<FluentId> { ids.iter().map(|f| remap[f.index()].unwrap()).collect() };
    for (i, (pre_pos, pre_neg, add, del, cost)) in actions.iter().enumerate() {
        out.action(
            &format!("a{i}"),
            &remap_all(pre_pos),
            &remap_all(pre_neg),
            &remap_all(add),
            &remap_all(del),
            *cost,
        );
    }
    out.set_init(&remap_all(&init));
    out.set_goal(&remap_all(&goal));
    drop(b);
    out.build()
}
