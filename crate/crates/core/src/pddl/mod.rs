//! PDDL front end: a parser for the supported subset, a deterministic
//! grounder, and an emitter for ground tasks.

mod emit;
mod ground;
mod model;
mod parse;
mod sexp;

pub use emit::{emit_pddl, EmitOptions, NamingContext, PddlEmission};
pub use ground::{ground, GroundingOptions};
pub use model::LiftedModel;
pub use parse::parse_pddl;
pub use sexp::Pos;

#[derive(Clone, Debug, thiserror::Error)]
pub enum PddlError {
    #[error("{pos}: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("unsupported requirement `{requirement}`")]
    UnsupportedRequirement { requirement: String },
    #[error("{msg}")]
    Semantic { msg: String },
    #[error("grounding exceeds the cap of {cap} ground actions (reached {reached})")]
    TooManyActions { cap: u64, reached: u64 },
    #[error("distinct {kind} share the name `{name}`")]
    NameCollision { name: String, kind: &'static str },
    #[error("mangled name `{emitted}` collides: `{first}` vs `{second}`")]
    EmitCollision { emitted: String, first: String, second: String },
}

impl PddlError {
    pub(crate) fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        PddlError::Parse { pos, msg: msg.into() }
    }
}
