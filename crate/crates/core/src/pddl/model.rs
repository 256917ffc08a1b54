//! The lifted task model produced by the parser and consumed by the
//! grounder: a single-inheritance type tree, typed objects, predicate
//! declarations, and action schemas with literal preconditions and
//! add/delete effects.

use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub usize);

/// Single-inheritance type tree rooted at `object`.
#[derive(Clone, Debug)]
pub struct TypeTable {
    names: Vec<String>,
    parent: Vec<Option<TypeId>>,
    index: HashMap<String, TypeId>,
}

pub const OBJECT_TYPE: TypeId = TypeId(0);

impl Default for TypeTable {
    fn default() -> Self {
        let mut table = TypeTable { names: Vec::new(), parent: Vec::new(), index: HashMap::new() };
        table.intern("object");
        table
    }
}

impl TypeTable {
    pub fn intern(&mut self, name: &str) -> TypeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = TypeId(self.names.len());
        self.names.push(name.to_string());
        self.parent.push(if name == "object" { None } else { Some(OBJECT_TYPE) });
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn set_parent(&mut self, child: TypeId, parent: TypeId) {
        self.parent[child.0] = Some(parent);
    }

    pub fn lookup(&self, name: &str) -> Option<TypeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: TypeId) -> &str {
        &self.names[id.0]
    }

    pub fn is_subtype(&self, ty: TypeId, ancestor: TypeId) -> bool {
        let mut current = Some(ty);
        while let Some(t) = current {
            if t == ancestor {
                return true;
            }
            current = self.parent[t.0];
        }
        false
    }

    /// True if following parent links from any type revisits a type.
    pub fn has_cycle(&self) -> bool {
        for start in 0..self.names.len() {
            let mut slow = Some(TypeId(start));
            let mut steps = 0;
            while let Some(t) = slow {
                slow = self.parent[t.0];
                steps += 1;
                if steps > self.names.len() {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Clone, Debug)]
pub struct TypedObject {
    pub name: String,
    pub ty: TypeId,
}

#[derive(Clone, Debug)]
pub struct PredicateDecl {
    pub name: String,
    pub param_types: Vec<TypeId>,
}

/// A term in a schema: a parameter of the schema or a constant object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    Param(usize),
    Object(ObjectId),
}

/// A precondition literal. `Equality` is the built-in static `=`.
#[derive(Clone, Debug)]
pub enum PreLiteral {
    Pred { pred: PredId, args: Vec<Term>, positive: bool },
    Equality { left: Term, right: Term, positive: bool },
}

/// An effect atom (equality cannot appear in effects).
#[derive(Clone, Debug)]
pub struct EffectAtom {
    pub pred: PredId,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug)]
pub struct ActionSchema {
    pub name: String,
    /// Parameter variable names (with the leading `?`) and their types.
    pub params: Vec<(String, TypeId)>,
    pub pre: Vec<PreLiteral>,
    pub add: Vec<EffectAtom>,
    pub del: Vec<EffectAtom>,
    pub cost: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<ObjectId>,
}

/// A parsed and type-checked domain/problem pair.
#[derive(Clone, Debug)]
pub struct LiftedModel {
    pub domain_name: String,
    pub problem_name: String,
    pub requirements: Vec<String>,
    pub types: TypeTable,
    pub objects: Vec<TypedObject>,
    pub object_index: HashMap<String, ObjectId>,
    pub predicates: Vec<PredicateDecl>,
    pub pred_index: HashMap<String, PredId>,
    pub schemas: Vec<ActionSchema>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
    /// True when any action carries an explicit cost expression.
    pub uses_costs: bool,
}

impl LiftedModel {
    pub fn object_name(&self, id: ObjectId) -> &str {
        &self.objects[id.0].name
    }

    pub fn pred_name(&self, id: PredId) -> &str {
        &self.predicates[id.0].name
    }

    /// Canonical ground name: predicate and arguments joined by `_`.
    pub fn atom_name(&self, atom: &GroundAtom) -> String {
        let mut name = self.pred_name(atom.pred).to_string();
        for &arg in &atom.args {
            name.push('_');
            name.push_str(self.object_name(arg));
        }
        name
    }
}
