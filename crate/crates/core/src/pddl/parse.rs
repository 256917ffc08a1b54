//! Parsing of the supported PDDL subset into a [`LiftedModel`].
//!
//! Accepted requirements: `:strips`, `:typing`, `:negative-preconditions`,
//! `:action-costs`, `:equality`. Costs are restricted to
//! `(increase (total-cost) <constant>)`; goals are conjunctions of positive
//! ground atoms.

use std::collections::HashMap;

use super::model::*;
use super::sexp::{parse_forms, Sexp};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: [&str; 5] =
    [":strips", ":typing", ":negative-preconditions", ":action-costs", ":equality"];

/// Parses a domain/problem pair into a type-checked lifted model.
pub fn parse_pddl(domain_text: &str, problem_text: &str) -> Result<LiftedModel, PddlError> {
    let domain_forms = parse_forms(domain_text)?;
    let problem_forms = parse_forms(problem_text)?;
    let domain = single_define(&domain_forms, "domain")?;
    let problem = single_define(&problem_forms, "problem")?;

    let mut p = Parser::default();
    p.parse_domain(domain)?;
    p.parse_problem(problem)?;
    p.finish()
}

fn single_define<'a>(forms: &'a [Sexp], what: &str) -> Result<&'a Sexp, PddlError> {
    match forms {
        [form] if form.head() == Some("define") => Ok(form),
        [form] => Err(PddlError::parse(form.pos, format!("expected a `(define ...)` {what} form"))),
        [] => Err(PddlError::parse(
            super::sexp::Pos { line: 1, col: 1 },
            format!("empty input, expected a {what} definition"),
        )),
        [_, extra, ..] => Err(PddlError::parse(extra.pos, "unexpected trailing form")),
    }
}

#[derive(Default)]
struct Parser {
    domain_name: String,
    problem_name: String,
    requirements: Vec<String>,
    types: TypeTable,
    objects: Vec<TypedObject>,
    object_index: HashMap<String, ObjectId>,
    predicates: Vec<PredicateDecl>,
    pred_index: HashMap<String, PredId>,
    schemas: Vec<ActionSchema>,
    init: Vec<GroundAtom>,
    goal: Vec<GroundAtom>,
    uses_costs: bool,
}

/// One entry of a PDDL typed list: names with an optional declared type.
struct TypedNames {
    names: Vec<(String, super::sexp::Pos)>,
    ty: Option<(String, super::sexp::Pos)>,
}

fn parse_typed_list(items: &[Sexp]) -> Result<Vec<TypedNames>, PddlError> {
    let mut groups = Vec::new();
    let mut names: Vec<(String, super::sexp::Pos)> = Vec::new();
    let mut iter = items.iter().peekable();
    while let Some(item) = iter.next() {
        let atom = item.expect_atom("a name in a typed list")?;
        if atom == "-" {
            let ty = iter
                .next()
                .ok_or_else(|| PddlError::parse(item.pos, "dangling `-` in typed list"))?;
            let ty_name = ty.expect_atom("a type name")?;
            groups.push(TypedNames {
                names: std::mem::take(&mut names),
                ty: Some((ty_name.to_string(), ty.pos)),
            });
        } else {
            names.push((atom.to_string(), item.pos));
        }
    }
    if !names.is_empty() {
        groups.push(TypedNames { names, ty: None });
    }
    Ok(groups)
}

impl Parser {
    fn parse_domain(&mut self, form: &Sexp) -> Result<(), PddlError> {
        let items = form.expect_list("domain definition")?;
        let mut sections = items.iter().skip(1);
        let name_form = sections
            .next()
            .ok_or_else(|| PddlError::parse(form.pos, "missing `(domain <name>)`"))?;
        let name_items = name_form.expect_list("`(domain <name>)`")?;
        match name_items {
            [head, name] if head.atom() == Some("domain") => {
                self.domain_name = name.expect_atom("domain name")?.to_string();
            }
            _ => return Err(PddlError::parse(name_form.pos, "expected `(domain <name>)`")),
        }

        for section in sections {
            let items = section.expect_list("a domain section")?;
            let head = section
                .head()
                .ok_or_else(|| PddlError::parse(section.pos, "empty domain section"))?;
            match head {
                ":requirements" => self.parse_requirements(&items[1..])?,
                ":types" => self.parse_types(&items[1..])?,
                ":constants" => self.parse_objects(&items[1..])?,
                ":predicates" => self.parse_predicates(&items[1..])?,
                ":functions" => self.parse_functions(&items[1..])?,
                ":action" => self.parse_action(section)?,
                other => {
                    return Err(PddlError::parse(
                        section.pos,
                        format!("unsupported domain section `{other}`"),
                    ))
                }
            }
        }
        Ok(())
    }

    fn parse_requirements(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        for item in items {
            let req = item.expect_atom("a requirement flag")?;
            if !SUPPORTED_REQUIREMENTS.contains(&req) {
                return Err(PddlError::UnsupportedRequirement { requirement: req.to_string() });
            }
            self.requirements.push(req.to_string());
        }
        Ok(())
    }

    fn parse_types(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        for group in parse_typed_list(items)? {
            let parent = match &group.ty {
                Some((name, _)) => self.types.intern(name),
                None => OBJECT_TYPE,
            };
            for (name, _pos) in &group.names {
                let child = self.types.intern(name);
                if child != parent {
                    self.types.set_parent(child, parent);
                }
            }
        }
        if self.types.has_cycle() {
            return Err(PddlError::Semantic { msg: "type hierarchy contains a cycle".into() });
        }
        Ok(())
    }

    fn resolve_type(&self, name: &str, pos: super::sexp::Pos) -> Result<TypeId, PddlError> {
        self.types
            .lookup(name)
            .ok_or_else(|| PddlError::parse(pos, format!("unknown type `{name}`")))
    }

    fn parse_objects(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        for group in parse_typed_list(items)? {
            let ty = match &group.ty {
                Some((name, pos)) => self.resolve_type(name, *pos)?,
                None => OBJECT_TYPE,
            };
            for (name, pos) in group.names {
                if self.object_index.contains_key(&name) {
                    return Err(PddlError::parse(pos, format!("duplicate object `{name}`")));
                }
                let id = ObjectId(self.objects.len());
                self.objects.push(TypedObject { name: name.clone(), ty });
                self.object_index.insert(name, id);
            }
        }
        Ok(())
    }

    fn parse_predicates(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        for item in items {
            let decl = item.expect_list("a predicate declaration")?;
            let name = decl
                .first()
                .ok_or_else(|| PddlError::parse(item.pos, "empty predicate declaration"))?
                .expect_atom("a predicate name")?;
            let mut param_types = Vec::new();
            for group in parse_typed_list(&decl[1..])? {
                let ty = match &group.ty {
                    Some((tname, pos)) => self.resolve_type(tname, *pos)?,
                    None => OBJECT_TYPE,
                };
                for _ in group.names {
                    param_types.push(ty);
                }
            }
            if self.pred_index.contains_key(name) {
                return Err(PddlError::parse(item.pos, format!("duplicate predicate `{name}`")));
            }
            let id = PredId(self.predicates.len());
            self.predicates.push(PredicateDecl { name: name.to_string(), param_types });
            self.pred_index.insert(name.to_string(), id);
        }
        Ok(())
    }

    fn parse_functions(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        // Only `(total-cost)` is supported, optionally typed `- number`.
        for group in items {
            if group.atom() == Some("-") || group.atom() == Some("number") {
                continue;
            }
            let decl = group.expect_list("a function declaration")?;
            let name = decl
                .first()
                .and_then(|s| s.atom())
                .ok_or_else(|| PddlError::parse(group.pos, "empty function declaration"))?;
            if name != "total-cost" || decl.len() != 1 {
                return Err(PddlError::parse(
                    group.pos,
                    format!("unsupported function `{name}` (only 0-ary `total-cost`)"),
                ));
            }
        }
        Ok(())
    }

    fn parse_action(&mut self, form: &Sexp) -> Result<(), PddlError> {
        let items = form.expect_list("an action definition")?;
        let name = items
            .get(1)
            .ok_or_else(|| PddlError::parse(form.pos, "action is missing a name"))?
            .expect_atom("an action name")?
            .to_string();

        let mut params: Vec<(String, TypeId)> = Vec::new();
        let mut pre: Vec<PreLiteral> = Vec::new();
        let mut add: Vec<EffectAtom> = Vec::new();
        let mut del: Vec<EffectAtom> = Vec::new();
        let mut cost: Option<u32> = None;

        let mut i = 2;
        while i < items.len() {
            let key = items[i].expect_atom("an action keyword")?;
            let value = items
                .get(i + 1)
                .ok_or_else(|| PddlError::parse(items[i].pos, format!("`{key}` missing a value")))?;
            match key {
                ":parameters" => {
                    for group in parse_typed_list(value.expect_list("a parameter list")?)? {
                        let ty = match &group.ty {
                            Some((tname, pos)) => self.resolve_type(tname, *pos)?,
                            None => OBJECT_TYPE,
                        };
                        for (vname, pos) in group.names {
                            if !vname.starts_with('?') {
                                return Err(PddlError::parse(
                                    pos,
                                    format!("parameter `{vname}` must start with `?`"),
                                ));
                            }
                            if params.iter().any(|(existing, _)| existing == &vname) {
                                return Err(PddlError::parse(
                                    pos,
                                    format!("duplicate parameter `{vname}`"),
                                ));
                            }
                            params.push((vname, ty));
                        }
                    }
                }
                ":precondition" => self.parse_precondition(value, &params, &mut pre)?,
                ":effect" => self.parse_effect(value, &params, &mut add, &mut del, &mut cost)?,
                other => {
                    return Err(PddlError::parse(
                        items[i].pos,
                        format!("unsupported action keyword `{other}`"),
                    ))
                }
            }
            i += 2;
        }

        if cost.is_some() {
            self.uses_costs = true;
        }
        self.schemas.push(ActionSchema { name, params, pre, add, del, cost: cost.unwrap_or(1) });
        Ok(())
    }

    fn conjuncts(expr: &Sexp) -> Result<Vec<&Sexp>, PddlError> {
        let items = expr.expect_list("a condition")?;
        if expr.head() == Some("and") {
            Ok(items[1..].iter().collect())
        } else {
            Ok(vec![expr])
        }
    }

    fn resolve_term(
        &self,
        sexp: &Sexp,
        params: &[(String, TypeId)],
    ) -> Result<(Term, TypeId), PddlError> {
        let name = sexp.expect_atom("a term")?;
        if name.starts_with('?') {
            let idx = params
                .iter()
                .position(|(p, _)| p == name)
                .ok_or_else(|| PddlError::parse(sexp.pos, format!("unbound variable `{name}`")))?;
            Ok((Term::Param(idx), params[idx].1))
        } else {
            let id = *self
                .object_index
                .get(name)
                .ok_or_else(|| PddlError::parse(sexp.pos, format!("unknown object `{name}`")))?;
            Ok((Term::Object(id), self.objects[id.0].ty))
        }
    }

    /// Parses `(pred t1 t2 ...)` with arity and type checking.
    fn parse_atom(
        &self,
        sexp: &Sexp,
        params: &[(String, TypeId)],
    ) -> Result<(PredId, Vec<Term>), PddlError> {
        let items = sexp.expect_list("an atom")?;
        let name = items
            .first()
            .and_then(|s| s.atom())
            .ok_or_else(|| PddlError::parse(sexp.pos, "empty atom"))?;
        let pred = *self
            .pred_index
            .get(name)
            .ok_or_else(|| PddlError::parse(sexp.pos, format!("unknown predicate `{name}`")))?;
        let decl = &self.predicates[pred.0];
        let args = &items[1..];
        if args.len() != decl.param_types.len() {
            return Err(PddlError::parse(
                sexp.pos,
                format!(
                    "predicate `{name}` takes {} arguments, got {}",
                    decl.param_types.len(),
                    args.len()
                ),
            ));
        }
        let mut terms = Vec::with_capacity(args.len());
        for (arg, &expected) in args.iter().zip(&decl.param_types) {
            let (term, ty) = self.resolve_term(arg, params)?;
            if !self.types.is_subtype(ty, expected) {
                return Err(PddlError::parse(
                    arg.pos,
                    format!(
                        "argument of `{name}` has type `{}`, expected `{}`",
                        self.types.name(ty),
                        self.types.name(expected)
                    ),
                ));
            }
            terms.push(term);
        }
        Ok((pred, terms))
    }

    fn parse_precondition(
        &self,
        expr: &Sexp,
        params: &[(String, TypeId)],
        out: &mut Vec<PreLiteral>,
    ) -> Result<(), PddlError> {
        for conjunct in Self::conjuncts(expr)? {
            let (positive, literal) = if conjunct.head() == Some("not") {
                let items = conjunct.list().unwrap();
                if items.len() != 2 {
                    return Err(PddlError::parse(conjunct.pos, "`not` takes exactly one literal"));
                }
                (false, &items[1])
            } else {
                (true, conjunct)
            };
            if literal.head() == Some("=") {
                let items = literal.list().unwrap();
                if items.len() != 3 {
                    return Err(PddlError::parse(literal.pos, "`=` takes exactly two terms"));
                }
                let (left, _) = self.resolve_term(&items[1], params)?;
                let (right, _) = self.resolve_term(&items[2], params)?;
                out.push(PreLiteral::Equality { left, right, positive });
            } else {
                let (pred, args) = self.parse_atom(literal, params)?;
                out.push(PreLiteral::Pred { pred, args, positive });
            }
        }
        Ok(())
    }

    fn parse_effect(
        &self,
        expr: &Sexp,
        params: &[(String, TypeId)],
        add: &mut Vec<EffectAtom>,
        del: &mut Vec<EffectAtom>,
        cost: &mut Option<u32>,
    ) -> Result<(), PddlError> {
        for conjunct in Self::conjuncts(expr)? {
            match conjunct.head() {
                Some("not") => {
                    let items = conjunct.list().unwrap();
                    if items.len() != 2 {
                        return Err(PddlError::parse(conjunct.pos, "`not` takes exactly one atom"));
                    }
                    let (pred, args) = self.parse_atom(&items[1], params)?;
                    del.push(EffectAtom { pred, args });
                }
                Some("increase") => {
                    let items = conjunct.list().unwrap();
                    let ok = items.len() == 3
                        && items[1].head() == Some("total-cost")
                        && items[1].list().is_some_and(|l| l.len() == 1);
                    if !ok {
                        return Err(PddlError::parse(
                            conjunct.pos,
                            "only `(increase (total-cost) <constant>)` is supported",
                        ));
                    }
                    let amount = items[2].expect_atom("a constant cost")?;
                    let value: u32 = amount.parse().map_err(|_| {
                        PddlError::parse(
                            items[2].pos,
                            format!("cost `{amount}` is not a non-negative integer"),
                        )
                    })?;
                    if cost.replace(value).is_some() {
                        return Err(PddlError::parse(conjunct.pos, "duplicate cost effect"));
                    }
                }
                _ => {
                    let (pred, args) = self.parse_atom(conjunct, params)?;
                    add.push(EffectAtom { pred, args });
                }
            }
        }
        Ok(())
    }

    fn parse_problem(&mut self, form: &Sexp) -> Result<(), PddlError> {
        let items = form.expect_list("problem definition")?;
        let mut saw_goal = false;
        let mut sections = items.iter().skip(1);
        let name_form = sections
            .next()
            .ok_or_else(|| PddlError::parse(form.pos, "missing `(problem <name>)`"))?;
        match name_form.list() {
            Some([head, name]) if head.atom() == Some("problem") => {
                self.problem_name = name.expect_atom("problem name")?.to_string();
            }
            _ => return Err(PddlError::parse(name_form.pos, "expected `(problem <name>)`")),
        }

        for section in sections {
            let items = section.expect_list("a problem section")?;
            let head = section
                .head()
                .ok_or_else(|| PddlError::parse(section.pos, "empty problem section"))?;
            match head {
                ":domain" => {
                    let name = items
                        .get(1)
                        .ok_or_else(|| PddlError::parse(section.pos, "missing domain name"))?
                        .expect_atom("domain name")?;
                    if name != self.domain_name {
                        return Err(PddlError::Semantic {
                            msg: format!(
                                "problem targets domain `{name}`, but the domain is `{}`",
                                self.domain_name
                            ),
                        });
                    }
                }
                ":objects" => self.parse_objects(&items[1..])?,
                ":requirements" => self.parse_requirements(&items[1..])?,
                ":init" => self.parse_init(&items[1..])?,
                ":goal" => {
                    let expr = items
                        .get(1)
                        .ok_or_else(|| PddlError::parse(section.pos, "missing goal condition"))?;
                    self.parse_goal(expr)?;
                    saw_goal = true;
                }
                ":metric" => {
                    let ok = items.len() == 3
                        && items[1].atom() == Some("minimize")
                        && items[2].head() == Some("total-cost");
                    if !ok {
                        return Err(PddlError::parse(
                            section.pos,
                            "only `(:metric minimize (total-cost))` is supported",
                        ));
                    }
                }
                other => {
                    return Err(PddlError::parse(
                        section.pos,
                        format!("unsupported problem section `{other}`"),
                    ))
                }
            }
        }
        if !saw_goal {
            return Err(PddlError::Semantic { msg: "problem declares no goal".into() });
        }
        Ok(())
    }

    fn ground_atom(&self, sexp: &Sexp) -> Result<GroundAtom, PddlError> {
        let (pred, terms) = self.parse_atom(sexp, &[])?;
        let args = terms
            .into_iter()
            .map(|t| match t {
                Term::Object(id) => id,
                Term::Param(_) => unreachable!("no parameters in ground context"),
            })
            .collect();
        Ok(GroundAtom { pred, args })
    }

    fn parse_init(&mut self, items: &[Sexp]) -> Result<(), PddlError> {
        for item in items {
            if item.head() == Some("=") {
                // `(= (total-cost) 0)` is tolerated and ignored.
                let ok = item.list().is_some_and(|l| {
                    l.len() == 3 && l[1].head() == Some("total-cost") && l[2].atom() == Some("0")
                });
                if !ok {
                    return Err(PddlError::parse(
                        item.pos,
                        "only `(= (total-cost) 0)` is supported in :init",
                    ));
                }
                continue;
            }
            let atom = self.ground_atom(item)?;
            if !self.init.contains(&atom) {
                self.init.push(atom);
            }
        }
        Ok(())
    }

    fn parse_goal(&mut self, expr: &Sexp) -> Result<(), PddlError> {
        for conjunct in Self::conjuncts(expr)? {
            if conjunct.head() == Some("not") {
                return Err(PddlError::parse(
                    conjunct.pos,
                    "negative goals are outside the supported subset",
                ));
            }
            let atom = self.ground_atom(conjunct)?;
            if !self.goal.contains(&atom) {
                self.goal.push(atom);
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<LiftedModel, PddlError> {
        Ok(LiftedModel {
            domain_name: self.domain_name,
            problem_name: self.problem_name,
            requirements: self.requirements,
            types: self.types,
            objects: self.objects,
            object_index: self.object_index,
            predicates: self.predicates,
            pred_index: self.pred_index,
            schemas: self.schemas,
            init: self.init,
            goal: self.goal,
            uses_costs: self.uses_costs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_DOMAIN: &str = "(define (domain mini)
        (:requirements :strips)
        (:predicates (done))
        (:action finish :parameters () :precondition (and) :effect (done)))";
    const MINIMAL_PROBLEM: &str =
        "(define (problem mini-1) (:domain mini) (:init) (:goal (done)))";

    #[test]
    fn minimal_domain_has_one_schema() {
        let model = parse_pddl(MINIMAL_DOMAIN, MINIMAL_PROBLEM).unwrap();
        assert_eq!(model.schemas.len(), 1);
        assert_eq!(model.predicates.len(), 1);
        assert_eq!(model.schemas[0].cost, 1);
        assert!(model.goal.len() == 1 && model.init.is_empty());
    }

    #[test]
    fn gripper_fixture_has_three_schemas() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
        let domain = std::fs::read_to_string(format!("{dir}/gripper-domain.pddl")).unwrap();
        let problem = std::fs::read_to_string(format!("{dir}/gripper-problem.pddl")).unwrap();
        let model = parse_pddl(&domain, &problem).unwrap();
        assert_eq!(model.schemas.len(), 3);
        let names: Vec<&str> = model.schemas.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["move", "pick", "drop"]);
    }

    #[test]
    fn adl_requirement_rejected() {
        let domain = "(define (domain bad) (:requirements :adl) (:predicates (p)))";
        let err = parse_pddl(domain, MINIMAL_PROBLEM).unwrap_err();
        match err {
            PddlError::UnsupportedRequirement { requirement } => assert_eq!(requirement, ":adl"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn arity_mismatch_reported_with_position() {
        let domain = "(define (domain bad)
            (:predicates (p ?x))
            (:action a :parameters () :precondition (p) :effect (p)))";
        let err = parse_pddl(domain, MINIMAL_PROBLEM).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("takes 1 arguments, got 0"), "{msg}");
        assert!(msg.contains("3:"), "position expected in `{msg}`");
    }

    #[test]
    fn type_mismatch_reported() {
        let domain = "(define (domain bad)
            (:requirements :strips :typing)
            (:types ball room)
            (:constants b1 - ball r1 - room)
            (:predicates (at ?b - ball ?r - room))
            (:action a :parameters () :precondition (at r1 b1) :effect (at b1 r1)))";
        let err = parse_pddl(domain, "(define (problem p) (:domain bad) (:init) (:goal (at b1 r1)))")
            .unwrap_err();
        assert!(err.to_string().contains("expected `ball`"), "{err}");
    }

    #[test]
    fn lexer_error_carries_line_and_column() {
        let err = parse_pddl("(define (domain d)", MINIMAL_PROBLEM).unwrap_err();
        assert!(err.to_string().contains("1:1"), "{err}");
    }

    #[test]
    fn unbound_variable_rejected() {
        let domain = "(define (domain bad)
            (:predicates (p ?x))
            (:action a :parameters () :precondition (p ?y) :effect (and)))";
        let err = parse_pddl(domain, MINIMAL_PROBLEM).unwrap_err();
        assert!(err.to_string().contains("unbound variable `?y`"), "{err}");
    }
}
