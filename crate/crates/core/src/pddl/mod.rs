//! PDDL export of compiled problems.
//!
//! Boolean fluents become predicates, integer fluents become numeric
//! functions, and a fluent valued in a user type `T` becomes a predicate with
//! a trailing `T` argument that holds for exactly one value. All objects are
//! emitted as domain constants so that action bodies may mention them.

mod lint;
mod names;

pub use lint::{lint, lint_domain, lint_problem, DomainSummary, LintError};
pub use names::Namer;

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Action, Effect, Expr, ExprKind, Fluent, ModelError, Problem, Type, Value};
use crate::pipeline::FeatureSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("cannot export a problem with high-level features ({0}); compile it first")]
    HighLevel(String),
    #[error("unsupported construct `{0}` in PDDL export")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Domain and problem files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlFiles {
    pub domain: String,
    pub problem: String,
}

#[derive(Default)]
struct Requirements {
    typing: bool,
    negative: bool,
    disjunctive: bool,
    equality: bool,
    conditional: bool,
    numeric: bool,
}

impl Requirements {
    fn render(&self) -> String {
        let mut out = vec![":strips"];
        for (on, name) in [
            (self.typing, ":typing"),
            (self.negative, ":negative-preconditions"),
            (self.disjunctive, ":disjunctive-preconditions"),
            (self.equality, ":equality"),
            (self.conditional, ":conditional-effects"),
            (self.numeric, ":numeric-fluents"),
        ] {
            if on {
                out.push(name);
            }
        }
        out.join(" ")
    }
}

struct Exporter<'a> {
    problem: &'a Problem,
    names: Namer,
    req: Requirements,
}

/// Exports a feature-free problem. Actions whose precondition simplifies to
/// false are left out.
pub fn export(problem: &Problem) -> Result<PddlFiles, PddlError> {
    let features = FeatureSet::of(problem);
    if !features.is_empty() {
        return Err(PddlError::HighLevel(features.to_string()));
    }
    let mut names = Namer::new();
    for t in problem.types() {
        names.global(&format!("type {}", t.name), &t.name);
    }
    for t in problem.types() {
        for o in &t.objects {
            names.global(&format!("object {o}"), o);
        }
    }
    for f in problem.fluents() {
        names.global(&format!("fluent {}", f.name), &f.name);
    }
    for a in problem.actions() {
        names.global(&format!("action {}", a.name), &a.name);
    }
    let mut ex = Exporter {
        problem,
        names,
        req: Requirements {
            typing: !problem.types().is_empty(),
            ..Requirements::default()
        },
    };
    let actions: Vec<String> = problem
        .actions()
        .iter()
        .filter(|a| !a.preconditions.iter().any(|p| p.as_bool() == Some(false)))
        .map(|a| ex.action(a))
        .collect::<Result<_, _>>()?;
    let init = ex.init()?;
    let goal = ex.conjunction(problem.goals(), "      ")?;
    let name = ex.names.plain(problem.name());

    let mut d = String::new();
    writeln!(d, "(define (domain {name})").unwrap();
    writeln!(d, "  (:requirements {})", ex.req.render()).unwrap();
    if !problem.types().is_empty() {
        let types: Vec<&str> = problem.types().iter().map(|t| ex.type_name(&t.name)).collect();
        writeln!(d, "  (:types {} - object)", types.join(" ")).unwrap();
        let mut constants = Vec::new();
        for t in problem.types() {
            if !t.objects.is_empty() {
                let objs: Vec<&str> = t.objects.iter().map(|o| ex.object(o)).collect();
                constants.push(format!("    {} - {}", objs.join(" "), ex.type_name(&t.name)));
            }
        }
        if !constants.is_empty() {
            writeln!(d, "  (:constants\n{}\n  )", constants.join("\n")).unwrap();
        }
    }
    let (predicates, functions) = ex.signatures();
    if !predicates.is_empty() {
        writeln!(d, "  (:predicates\n{}\n  )", predicates.join("\n")).unwrap();
    }
    if !functions.is_empty() {
        writeln!(d, "  (:functions\n{}\n  )", functions.join("\n")).unwrap();
    }
    for a in &actions {
        d.push_str(a);
    }
    d.push_str(")\n");

    let mut p = String::new();
    writeln!(p, "(define (problem {name}_problem)").unwrap();
    writeln!(p, "  (:domain {name})").unwrap();
    if init.is_empty() {
        writeln!(p, "  (:init)").unwrap();
    } else {
        writeln!(p, "  (:init\n{}\n  )", init.join("\n")).unwrap();
    }
    writeln!(p, "  (:goal {goal}\n    )\n  )").unwrap();
    p.push_str(")\n");
    Ok(PddlFiles {
        domain: d,
        problem: p,
    })
}

fn unsupported(e: &Expr) -> PddlError {
    PddlError::Unsupported(e.to_string())
}

impl Exporter<'_> {
    fn type_name(&self, t: &str) -> &str {
        self.names.get(&format!("type {t}"))
    }

    fn object(&self, o: &str) -> &str {
        self.names.get(&format!("object {o}"))
    }

    fn fluent_name(&self, f: &str) -> &str {
        self.names.get(&format!("fluent {f}"))
    }

    fn signatures(&self) -> (Vec<String>, Vec<String>) {
        let mut predicates = Vec::new();
        let mut functions = Vec::new();
        for f in self.problem.fluents() {
            let mut sig = String::from(self.fluent_name(&f.name));
            let mut locals = Namer::new();
            for p in &f.params {
                let v = locals.local(&p.name);
                write!(sig, " ?{v} - {}", self.type_name(p.ty.user_name().unwrap_or("object"))).unwrap();
            }
            match &f.value_type {
                Type::Bool => predicates.push(format!("    ({sig})")),
                Type::User(t) => {
                    let v = locals.local("value");
                    predicates.push(format!("    ({sig} ?{v} - {})", self.type_name(t)));
                }
                Type::Int { lower, upper } => {
                    functions.push(format!("    ; {}: integer[{lower}, {upper}]", self.fluent_name(&f.name)));
                    functions.push(format!("    ({sig}) - number"));
                }
                Type::Array { .. } => unreachable!("checked by FeatureSet"),
            }
        }
        (predicates, functions)
    }

    fn action(&mut self, a: &Action) -> Result<String, PddlError> {
        let mut locals = Namer::new();
        let params: Vec<String> = a
            .params
            .iter()
            .map(|p| {
                let v = locals.local(&p.name);
                let ty = p.ty.user_name().ok_or_else(|| PddlError::Unsupported(format!("parameter {}", p.name)))?;
                Ok(format!("?{v} - {}", self.type_name(ty)))
            })
            .collect::<Result<_, PddlError>>()?;
        let scope = Scope { locals: &locals };
        let pre = self.conjunction_in(&a.preconditions, "      ", &scope)?;
        let mut effects = Vec::new();
        for e in &a.effects {
            effects.extend(self.effect(e, &scope)?);
        }
        let mut s = String::new();
        writeln!(s, "  (:action {}", self.names.get(&format!("action {}", a.name))).unwrap();
        writeln!(s, "    :parameters ({})", params.join(" ")).unwrap();
        writeln!(s, "    :precondition {pre}\n    )").unwrap();
        if effects.is_empty() {
            writeln!(s, "    :effect (and)").unwrap();
        } else {
            let body: Vec<String> = effects.iter().map(|e| format!("      {e}")).collect();
            writeln!(s, "    :effect (and\n{}\n    )", body.join("\n")).unwrap();
        }
        s.push_str("  )\n");
        Ok(s)
    }

    fn conjunction(&mut self, items: &[Expr], indent: &str) -> Result<String, PddlError> {
        let locals = Namer::new();
        self.conjunction_in(items, indent, &Scope { locals: &locals })
    }

    /// `(and` followed by one conjunct per line; the caller closes it.
    fn conjunction_in(&mut self, items: &[Expr], indent: &str, scope: &Scope) -> Result<String, PddlError> {
        let mut s = String::from("(and");
        for e in items {
            if e.as_bool() == Some(true) {
                continue;
            }
            write!(s, "\n{indent}{}", self.cond(e, scope)?).unwrap();
        }
        Ok(s)
    }

    fn atom(&self, name: &str, args: &[Expr], scope: &Scope, extra: Option<&str>) -> Result<String, PddlError> {
        let mut s = format!("({}", self.fluent_name(name));
        for a in args {
            write!(s, " {}", self.term(a, scope)?).unwrap();
        }
        if let Some(x) = extra {
            write!(s, " {x}").unwrap();
        }
        s.push(')');
        Ok(s)
    }

    /// Object or parameter as a PDDL term.
    fn term(&self, e: &Expr, scope: &Scope) -> Result<String, PddlError> {
        match e.kind() {
            ExprKind::Object(o) => Ok(self.object(o).to_string()),
            ExprKind::Param(p) => Ok(format!("?{}", scope.locals.get(p))),
            _ => Err(unsupported(e)),
        }
    }

    fn cond(&mut self, e: &Expr, scope: &Scope) -> Result<String, PddlError> {
        Ok(match e.kind() {
            ExprKind::Bool(true) => "(and)".into(),
            ExprKind::Bool(false) => {
                self.req.disjunctive = true;
                "(or)".into()
            }
            ExprKind::Fluent(acc) if acc.indices.is_empty() && e.ty().is_bool() => {
                self.atom(&acc.name, &acc.args, scope, None)?
            }
            ExprKind::Not(x) => {
                self.req.negative = true;
                format!("(not {})", self.cond(x, scope)?)
            }
            ExprKind::And(xs) => self.nary("and", xs, scope)?,
            ExprKind::Or(xs) => {
                self.req.disjunctive = true;
                self.nary("or", xs, scope)?
            }
            ExprKind::Implies(a, b) => {
                self.req.disjunctive = true;
                self.req.negative = true;
                format!("(or (not {}) {})", self.cond(a, scope)?, self.cond(b, scope)?)
            }
            ExprKind::Iff(a, b) => self.iff(a, b, scope)?,
            ExprKind::Equals(a, b) if a.ty().is_bool() => self.iff(a, b, scope)?,
            ExprKind::Equals(a, b) if a.ty().user_name().is_some() => self.user_equals(a, b, scope)?,
            ExprKind::Equals(a, b) => self.compare("=", a, b, scope)?,
            ExprKind::Le(a, b) => self.compare("<=", a, b, scope)?,
            ExprKind::Lt(a, b) => self.compare("<", a, b, scope)?,
            ExprKind::Ge(a, b) => self.compare(">=", a, b, scope)?,
            ExprKind::Gt(a, b) => self.compare(">", a, b, scope)?,
            _ => return Err(unsupported(e)),
        })
    }

    fn nary(&mut self, op: &str, xs: &[Expr], scope: &Scope) -> Result<String, PddlError> {
        let parts: Vec<String> = xs.iter().map(|x| self.cond(x, scope)).collect::<Result<_, _>>()?;
        Ok(format!("({op} {})", parts.join(" ")))
    }

    fn iff(&mut self, a: &Expr, b: &Expr, scope: &Scope) -> Result<String, PddlError> {
        self.req.disjunctive = true;
        self.req.negative = true;
        let (x, y) = (self.cond(a, scope)?, self.cond(b, scope)?);
        Ok(format!("(or (and {x} {y}) (and (not {x}) (not {y})))"))
    }

    fn compare(&mut self, op: &str, a: &Expr, b: &Expr, scope: &Scope) -> Result<String, PddlError> {
        self.req.numeric = true;
        Ok(format!("({op} {} {})", self.num(a, scope)?, self.num(b, scope)?))
    }

    fn num(&mut self, e: &Expr, scope: &Scope) -> Result<String, PddlError> {
        Ok(match e.kind() {
            ExprKind::Int(v) if *v < 0 => format!("(- 0 {})", v.unsigned_abs()),
            ExprKind::Int(v) => v.to_string(),
            ExprKind::Fluent(acc) if acc.indices.is_empty() && e.ty().is_int() => {
                self.req.numeric = true;
                self.atom(&acc.name, &acc.args, scope, None)?
            }
            ExprKind::Plus(xs) => self.fold_num("+", xs, scope)?,
            ExprKind::Times(xs) => self.fold_num("*", xs, scope)?,
            ExprKind::Minus(a, b) => format!("(- {} {})", self.num(a, scope)?, self.num(b, scope)?),
            _ => return Err(unsupported(e)),
        })
    }

    fn fold_num(&mut self, op: &str, xs: &[Expr], scope: &Scope) -> Result<String, PddlError> {
        let mut parts = xs.iter().map(|x| self.num(x, scope));
        let first = parts.next().ok_or_else(|| PddlError::Unsupported(format!("empty {op}")))??;
        parts.try_fold(first, |acc, x| Ok(format!("({op} {acc} {})", x?)))
    }

    /// Possible values of a user-typed term, each with the condition under
    /// which the term takes it (`None` for unconditionally).
    fn user_values(&mut self, e: &Expr, scope: &Scope) -> Result<Vec<(Option<String>, String)>, PddlError> {
        let ty = e.ty().clone();
        match e.kind() {
            ExprKind::Object(_) => Ok(vec![(None, self.term(e, scope)?)]),
            ExprKind::Param(_) => {
                self.req.equality = true;
                let p = self.term(e, scope)?;
                Ok(self
                    .domain(&ty)
                    .into_iter()
                    .map(|o| (Some(format!("(= {p} {o})")), o))
                    .collect())
            }
            ExprKind::Fluent(acc) if acc.indices.is_empty() => self
                .domain(&ty)
                .into_iter()
                .map(|o| Ok((Some(self.atom(&acc.name, &acc.args, scope, Some(&o))?), o)))
                .collect(),
            _ => Err(unsupported(e)),
        }
    }

    fn domain(&self, ty: &Type) -> Vec<String> {
        self.problem
            .objects_of(ty)
            .iter()
            .map(|o| self.object(o).to_string())
            .collect()
    }

    fn user_equals(&mut self, a: &Expr, b: &Expr, scope: &Scope) -> Result<String, PddlError> {
        let fixed = |e: &Expr| matches!(e.kind(), ExprKind::Object(_) | ExprKind::Param(_));
        match (fixed(a), fixed(b)) {
            (true, true) => {
                self.req.equality = true;
                Ok(format!("(= {} {})", self.term(a, scope)?, self.term(b, scope)?))
            }
            (false, true) | (true, false) => {
                let (f, v) = if fixed(b) { (a, b) } else { (b, a) };
                match f.kind() {
                    ExprKind::Fluent(acc) if acc.indices.is_empty() => {
                        let v = self.term(v, scope)?;
                        self.atom(&acc.name, &acc.args, scope, Some(&v))
                    }
                    _ => Err(unsupported(f)),
                }
            }
            (false, false) => {
                self.req.disjunctive = true;
                let left = self.user_values(a, scope)?;
                let right = self.user_values(b, scope)?;
                let cases: Vec<String> = left
                    .iter()
                    .filter_map(|(lc, lo)| {
                        let (rc, _) = right.iter().find(|(_, ro)| ro == lo)?;
                        Some(format!(
                            "(and {} {})",
                            lc.as_deref().unwrap_or("(and)"),
                            rc.as_deref().unwrap_or("(and)")
                        ))
                    })
                    .collect();
                Ok(format!("(or {})", cases.join(" ")))
            }
        }
    }

    fn effect(&mut self, e: &Effect, scope: &Scope) -> Result<Vec<String>, PddlError> {
        let ExprKind::Fluent(acc) = e.target.kind() else {
            return Err(unsupported(&e.target));
        };
        let condition = e.condition.as_ref().map(|c| self.cond(c, scope)).transpose()?;
        // (guard, literals) pairs; a pair fires when its guard holds.
        let mut cases: Vec<(Option<String>, Vec<String>)> = Vec::new();
        let fluent: &Fluent = self
            .problem
            .fluent(&acc.name)
            .ok_or_else(|| PddlError::Unsupported(format!("undeclared fluent {}", acc.name)))?;
        match &fluent.value_type {
            Type::Bool => {
                let atom = self.atom(&acc.name, &acc.args, scope, None)?;
                match e.value.as_bool() {
                    Some(true) => cases.push((None, vec![atom])),
                    Some(false) => cases.push((None, vec![format!("(not {atom})")])),
                    None => {
                        let v = self.cond(&e.value, scope)?;
                        cases.push((Some(v.clone()), vec![atom.clone()]));
                        cases.push((Some(format!("(not {v})")), vec![format!("(not {atom})")]));
                    }
                }
            }
            Type::Int { .. } => {
                self.req.numeric = true;
                let target = self.atom(&acc.name, &acc.args, scope, None)?;
                cases.push((None, vec![format!("(assign {target} {})", self.num(&e.value, scope)?)]));
            }
            Type::User(_) => {
                let domain = self.domain(&fluent.value_type);
                for (guard, value) in self.user_values(&e.value, scope)? {
                    let mut lits = vec![self.atom(&acc.name, &acc.args, scope, Some(&value))?];
                    for other in domain.iter().filter(|o| **o != value) {
                        lits.push(format!("(not {})", self.atom(&acc.name, &acc.args, scope, Some(other))?));
                    }
                    cases.push((guard, lits));
                }
            }
            Type::Array { .. } => return Err(unsupported(&e.target)),
        }
        let mut out = Vec::new();
        for (guard, lits) in cases {
            let guard = match (&condition, guard) {
                (None, None) => None,
                (Some(c), None) => Some(c.clone()),
                (None, Some(g)) => Some(g),
                (Some(c), Some(g)) => Some(format!("(and {c} {g})")),
            };
            match guard {
                None => out.extend(lits),
                Some(g) => {
                    self.req.conditional = true;
                    if g.contains("(not ") {
                        self.req.negative = true;
                    }
                    let body = if lits.len() == 1 {
                        lits.into_iter().next().unwrap()
                    } else {
                        format!("(and {})", lits.join(" "))
                    };
                    out.push(format!("(when {g} {body})"));
                }
            }
        }
        Ok(out)
    }

    fn init(&mut self) -> Result<Vec<String>, PddlError> {
        let state = self.problem.initial_state()?;
        let mut out = Vec::new();
        for (gf, value) in state.iter() {
            let mut atom = String::from(self.fluent_name(&gf.name));
            for a in &gf.args {
                write!(atom, " {}", self.object(a)).unwrap();
            }
            match value {
                Value::Bool(true) => out.push(format!("    ({atom})")),
                Value::Bool(false) => {}
                Value::Int(v) if *v < 0 => out.push(format!("    (= ({atom}) (- 0 {}))", v.unsigned_abs())),
                Value::Int(v) => out.push(format!("    (= ({atom}) {v})")),
                Value::Object(o) => out.push(format!("    ({atom} {})", self.object(o))),
                Value::Array(_) => return Err(PddlError::Unsupported(format!("array value of {}", gf.name))),
            }
        }
        Ok(out)
    }
}

struct Scope<'a> {
    locals: &'a Namer,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains;
    use crate::pipeline::{compile, Options};

    fn compiled_robot() -> Problem {
        compile(&domains::robot_grid(3).unwrap(), Options::default()).unwrap().problem
    }

    #[test]
    fn robot_counts() {
        let files = export(&compiled_robot()).unwrap();
        assert_eq!(files.domain.matches("(:action ").count(), 24);
        let summary = lint(&files.domain, &files.problem).unwrap();
        assert_eq!(summary.predicates.len(), 9);
        assert!(files.problem.contains("    (at_robot_0_0)\n"));
        assert!(files.problem.contains("(= (count_0) 1)"));
        assert!(files.domain.contains("; count_0: integer[0, 1]"));
    }

    #[test]
    fn deterministic() {
        let a = export(&compiled_robot()).unwrap();
        let b = export(&compiled_robot()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_actions() {
        let mut pb = Problem::builder("empty");
        let x = pb.fluent("x", &[], Type::Bool).unwrap();
        pb.add_goal(x.get().unwrap()).unwrap();
        let files = export(&pb.build().unwrap()).unwrap();
        assert!(!files.domain.contains(":action"));
        lint(&files.domain, &files.problem).unwrap();
    }

    #[test]
    fn rejects_high_level() {
        assert!(matches!(
            export(&domains::robot_grid(2).unwrap()),
            Err(PddlError::HighLevel(_))
        ));
    }

    #[test]
    fn user_valued_fluents() {
        let p = compile(
            &domains::gen_plotting(2, 2, &["R", "B"], &[vec!["R", "B"], vec!["B", "B"]], 1).unwrap(),
            Options::default(),
        )
        .unwrap()
        .problem;
        let files = export(&p).unwrap();
        lint(&files.domain, &files.problem).unwrap();
        assert!(files.domain.contains("(blocks_0_0 ?value - colour)"));
        assert!(files.problem.contains("    (hand w)\n"));
        assert!(files.domain.contains(":conditional-effects"));
    }
}
