//! Goal-commit compilation toolkit for ground STRIPS planning.
//!
//! The centerpiece is [`compile::compile`], which rewrites a planning task
//! so that dedicated action variants permanently lock in achieved goals:
//! each pending goal gets a commit fluent, goal-adding actions gain
//! variants that set commit fluents for a chosen subset of the goals they
//! add, and goal-deleting actions are guarded against undoing committed
//! goals. Solvability and optimal cost carry over in both directions, and
//! [`planmap`] turns the two constructive directions of that argument into
//! executable plan translations.
//!
//! Around that core: [`strips`] holds the task model and execution
//! semantics, [`search`] provides deterministic optimal and greedy engines
//! (also used as verification oracles), [`taskgen`] generates seeded random
//! instances for property testing, [`pddl`] and [`jsonio`] read and write
//! tasks, and [`mod@bench`]/[`external`] run benchmark suites through the
//! internal engines or any external planner.

pub mod bench;
pub mod bitset;
pub mod compile;
pub mod external;
pub mod heuristics;
pub mod jsonio;
pub mod metrics;
pub mod pddl;
pub mod planfile;
pub mod planmap;
pub mod search;
pub mod strips;
pub mod taskgen;

pub use bitset::FluentSet;
pub use compile::{compile, CompileOptions, CompiledTask};
pub use strips::{Action, ActionId, Fluent, FluentId, Plan, State, Task, TaskBuilder, Trace};
