//! Expression evaluation, parameter substitution and constant folding.

mod simplify;

pub use simplify::simplify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{Expr, ExprKind, GroundFluent, ModelError, State, Type, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// Array index outside the declared bounds, with the offending access.
    #[error("undefined array access {access}")]
    OutOfRange { access: String },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("no value for fluent {0}")]
    MissingFluent(String),
    #[error("integer overflow evaluating `{0}`")]
    Overflow(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        EvalError::TypeMismatch(e.to_string())
    }
}

/// Parameter assignment: name to integer or object value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding(BTreeMap<Arc<str>, Value>);

impl Binding {
    pub fn new() -> Binding {
        Binding::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Binding {
        self.insert(name, value.into());
        self
    }

    pub fn insert(&mut self, name: &str, value: Value) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }

    /// Union of two bindings; `other` wins on shared names.
    pub fn merged(&self, other: &Binding) -> Binding {
        let mut out = self.clone();
        for (k, v) in &other.0 {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }
}

impl FromIterator<(String, Value)> for Binding {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Binding(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// How an out-of-range array access is treated during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutOfRange {
    /// Report [`EvalError::OutOfRange`].
    Error,
    /// The nearest enclosing bool-typed expression evaluates to false.
    FoldToFalse,
}

/// Evaluates `expr` in `state`; any out-of-range access is an error.
pub fn evaluate(expr: &Expr, state: &State, binding: &Binding) -> Result<Value, EvalError> {
    Evaluator {
        state,
        binding,
        policy: OutOfRange::Error,
    }
    .eval(expr)
}

/// Evaluates with an explicit out-of-range policy.
pub fn evaluate_with(
    expr: &Expr,
    state: &State,
    binding: &Binding,
    policy: OutOfRange,
) -> Result<Value, EvalError> {
    Evaluator {
        state,
        binding,
        policy,
    }
    .eval(expr)
}

pub fn evaluate_bool(expr: &Expr, state: &State, binding: &Binding, policy: OutOfRange) -> Result<bool, EvalError> {
    match evaluate_with(expr, state, binding, policy)? {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::TypeMismatch(format!(
            "`{expr}` evaluated to non-bool {other}"
        ))),
    }
}

/// Resolved location written by an effect target: instance plus cell path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub fluent: GroundFluent,
    pub path: Vec<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fluent)?;
        for i in &self.path {
            write!(f, "[{i}]")?;
        }
        Ok(())
    }
}

/// Resolves a fluent access to the location it denotes (arguments and indices evaluated).
pub fn locate(target: &Expr, state: &State, binding: &Binding) -> Result<Location, EvalError> {
    let ev = Evaluator {
        state,
        binding,
        policy: OutOfRange::Error,
    };
    ev.locate(target)
}

struct Evaluator<'a> {
    state: &'a State,
    binding: &'a Binding,
    policy: OutOfRange,
}

impl Evaluator<'_> {
    fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        let result = self.eval_node(e);
        match result {
            Err(EvalError::OutOfRange { .. })
                if self.policy == OutOfRange::FoldToFalse && e.ty().is_bool() =>
            {
                Ok(Value::Bool(false))
            }
            other => other,
        }
    }

    fn bool(&self, e: &Expr) -> Result<bool, EvalError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => Err(EvalError::TypeMismatch(format!("`{e}` evaluated to {v}"))),
        }
    }

    fn int(&self, e: &Expr) -> Result<i64, EvalError> {
        match self.eval(e)? {
            Value::Int(i) => Ok(i),
            v => Err(EvalError::TypeMismatch(format!("`{e}` evaluated to {v}"))),
        }
    }

    fn locate(&self, e: &Expr) -> Result<Location, EvalError> {
        let access = e
            .as_fluent()
            .ok_or_else(|| EvalError::TypeMismatch(format!("`{e}` is not a fluent access")))?;
        let args = access
            .args
            .iter()
            .map(|a| match self.eval(a)? {
                Value::Object(o) => Ok(o),
                v => Err(EvalError::TypeMismatch(format!("fluent argument `{a}` evaluated to {v}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let fluent = GroundFluent {
            name: access.name.clone(),
            args,
        };
        let indices = access
            .indices
            .iter()
            .map(|i| self.int(i))
            .collect::<Result<Vec<_>, _>>()?;
        let dims = access.value_type.dims();
        let mut path = Vec::with_capacity(indices.len());
        for (level, &i) in indices.iter().enumerate() {
            if i < 0 || i as usize >= dims[level] {
                let mut rendered = fluent.to_string();
                for j in &indices {
                    rendered.push_str(&format!("[{j}]"));
                }
                return Err(EvalError::OutOfRange { access: rendered });
            }
            path.push(i as usize);
        }
        Ok(Location { fluent, path })
    }

    fn eval_node(&self, e: &Expr) -> Result<Value, EvalError> {
        use ExprKind::*;
        let overflow = || EvalError::Overflow(e.to_string());
        Ok(match e.kind() {
            Bool(b) => Value::Bool(*b),
            Int(i) => Value::Int(*i),
            Object(o) => Value::Object(o.clone()),
            Param(p) => self
                .binding
                .get(p)
                .cloned()
                .ok_or_else(|| EvalError::UnboundParameter(p.to_string()))?,
            Fluent(_) => {
                let loc = self.locate(e)?;
                let whole = self
                    .state
                    .get(&loc.fluent)
                    .ok_or_else(|| EvalError::MissingFluent(loc.fluent.to_string()))?;
                whole
                    .at(&loc.path)
                    .cloned()
                    .ok_or_else(|| EvalError::MissingFluent(loc.to_string()))?
            }
            Array(items) => Value::Array(
                items
                    .iter()
                    .map(|x| self.eval(x))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Not(x) => Value::Bool(!self.bool(x)?),
            And(xs) => {
                // Every operand is evaluated; there is no short-circuit.
                let vals = xs.iter().map(|x| self.bool(x)).collect::<Result<Vec<_>, _>>()?;
                Value::Bool(vals.into_iter().all(|b| b))
            }
            Or(xs) => {
                let vals = xs.iter().map(|x| self.bool(x)).collect::<Result<Vec<_>, _>>()?;
                Value::Bool(vals.into_iter().any(|b| b))
            }
            Implies(a, b) => {
                let (a, b) = (self.bool(a)?, self.bool(b)?);
                Value::Bool(!a || b)
            }
            Iff(a, b) | Equals(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                Value::Bool(a == b)
            }
            Le(a, b) => Value::Bool(self.int(a)? <= self.int(b)?),
            Lt(a, b) => Value::Bool(self.int(a)? < self.int(b)?),
            Ge(a, b) => Value::Bool(self.int(a)? >= self.int(b)?),
            Gt(a, b) => Value::Bool(self.int(a)? > self.int(b)?),
            Plus(xs) => {
                let mut acc: i64 = 0;
                for x in xs {
                    acc = acc.checked_add(self.int(x)?).ok_or_else(overflow)?;
                }
                Value::Int(acc)
            }
            Times(xs) => {
                let mut acc: i64 = 1;
                for x in xs {
                    acc = acc.checked_mul(self.int(x)?).ok_or_else(overflow)?;
                }
                Value::Int(acc)
            }
            Minus(a, b) => Value::Int(self.int(a)?.checked_sub(self.int(b)?).ok_or_else(overflow)?),
            Count(xs) => {
                let mut n = 0;
                for x in xs {
                    if self.bool(x)? {
                        n += 1;
                    }
                }
                Value::Int(n)
            }
        })
    }
}

/// Replaces every parameter covered by `binding` with its constant value.
/// The result is not simplified.
pub fn substitute(expr: &Expr, binding: &Binding) -> Result<Expr, EvalError> {
    if binding.is_empty() {
        return Ok(expr.clone());
    }
    if let ExprKind::Param(name) = expr.kind() {
        return match binding.get(name) {
            Some(v) => param_constant(name, expr.ty(), v),
            None => Ok(expr.clone()),
        };
    }
    expr.try_map_children(|c| substitute(c, binding))
}

fn param_constant(name: &str, ty: &Type, value: &Value) -> Result<Expr, EvalError> {
    let bad = || {
        EvalError::TypeMismatch(format!(
            "value {value} does not fit parameter `{name}` of type {ty}"
        ))
    };
    match (ty, value) {
        (Type::Int { lower, upper }, Value::Int(v)) if lower <= v && v <= upper => Ok(Expr::int(*v)),
        (Type::User(_), Value::Object(o)) => Ok(Expr::object(o, ty)?),
        _ => Err(bad()),
    }
}

/// Replaces fluent accesses (matched structurally) by expressions, all at once.
pub fn replace_fluents(expr: &Expr, replacements: &BTreeMap<Expr, Expr>) -> Result<Expr, ModelError> {
    if replacements.is_empty() {
        return Ok(expr.clone());
    }
    if let Some(r) = replacements.get(expr) {
        return Ok(r.clone());
    }
    expr.try_map_children(|c| replace_fluents(c, replacements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fluent, Problem, Type};

    fn robot_grid() -> (Problem, Fluent) {
        let mut pb = Problem::builder("grid");
        let grid = Type::array_of(&[3, 3], Type::Bool).unwrap();
        let at_robot = pb.fluent("at_robot", &[], grid).unwrap();
        pb.set_default(&at_robot, Value::filled(&[3, 3], &Value::Bool(false)))
            .unwrap();
        pb.set_initial_value(&at_robot.at(&[0, 0]).unwrap(), true).unwrap();
        (pb.build().unwrap(), at_robot)
    }

    #[test]
    fn count_of_robot_cells_in_initial_state() {
        let (problem, at_robot) = robot_grid();
        let cells = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .map(|(r, c)| at_robot.at(&[r, c]).unwrap())
            .collect();
        let count = Expr::count(cells).unwrap();
        let s = problem.initial_state().unwrap();
        assert_eq!(evaluate(&count, &s, &Binding::new()).unwrap(), Value::Int(1));
    }

    #[test]
    fn empty_connectives() {
        let s = robot_grid().0.initial_state().unwrap();
        let b = Binding::new();
        assert_eq!(evaluate(&Expr::and(vec![]).unwrap(), &s, &b).unwrap(), Value::Bool(true));
        assert_eq!(evaluate(&Expr::or(vec![]).unwrap(), &s, &b).unwrap(), Value::Bool(false));
    }

    #[test]
    fn arithmetic_index_resolves_cell() {
        let (problem, at_robot) = robot_grid();
        let c = Expr::param("c", &Type::int(0, 1).unwrap()).unwrap();
        let r = Expr::param("r", &Type::int(0, 2).unwrap()).unwrap();
        let access = at_robot
            .cell(vec![r, Expr::plus(vec![c, Expr::int(1)]).unwrap()])
            .unwrap();
        let s = problem.initial_state().unwrap();
        let b = Binding::new().with("r", 0i64).with("c", 1i64);
        let loc = locate(&access, &s, &b).unwrap();
        assert_eq!(loc.path, vec![0, 2]);
        assert_eq!(evaluate(&access, &s, &b).unwrap(), Value::Bool(false));
    }

    #[test]
    fn out_of_range_names_the_access_or_folds() {
        let (problem, at_robot) = robot_grid();
        let s = problem.initial_state().unwrap();
        let b = Binding::new();
        let bad = at_robot.at(&[2, 3]).unwrap();
        let err = evaluate(&bad, &s, &b).unwrap_err();
        assert_eq!(err.to_string(), "undefined array access at_robot[2][3]");
        let neg = Expr::not(bad).unwrap();
        assert_eq!(
            evaluate_with(&neg, &s, &b, OutOfRange::FoldToFalse).unwrap(),
            Value::Bool(true)
        );
    }

    #[test]
    fn substitution_examples() {
        let (_, at_robot) = robot_grid();
        let r = Expr::param("r", &Type::int(0, 2).unwrap()).unwrap();
        let c = Expr::param("c", &Type::int(0, 1).unwrap()).unwrap();
        let e = at_robot
            .cell(vec![r, Expr::plus(vec![c, Expr::int(1)]).unwrap()])
            .unwrap();
        let b = Binding::new().with("r", 0i64).with("c", 1i64);
        let sub = substitute(&e, &b).unwrap();
        assert_eq!(sub.to_string(), "at_robot[0][Plus(1, 1)]");
        assert_eq!(substitute(&e, &Binding::new()).unwrap(), e);

        let colour = Type::user("Colour");
        let p = Expr::param("p", &colour).unwrap();
        let w = Expr::object("W", &colour).unwrap();
        let eq = Expr::equals(p, w.clone()).unwrap();
        let sub = substitute(&eq, &Binding::new().with("p", "W")).unwrap();
        assert_eq!(sub, Expr::equals(w.clone(), w).unwrap());
    }

    #[test]
    fn substitution_rejects_ill_typed_values() {
        let c = Expr::param("c", &Type::int(0, 1).unwrap()).unwrap();
        assert!(substitute(&c, &Binding::new().with("c", 2i64)).is_err());
        assert!(substitute(&c, &Binding::new().with("c", "A")).is_err());
    }

    #[test]
    fn two_step_substitution_equals_one_step() {
        let r = Expr::param("r", &Type::int(0, 2).unwrap()).unwrap();
        let c = Expr::param("c", &Type::int(0, 2).unwrap()).unwrap();
        let e = Expr::le(Expr::plus(vec![r, Expr::int(1)]).unwrap(), c).unwrap();
        let both = Binding::new().with("r", 1i64).with("c", 2i64);
        let step = substitute(
            &substitute(&e, &Binding::new().with("r", 1i64)).unwrap(),
            &Binding::new().with("c", 2i64),
        )
        .unwrap();
        assert_eq!(step, substitute(&e, &both).unwrap());
    }
}
