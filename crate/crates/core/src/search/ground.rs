use std::collections::BTreeMap;
use std::sync::Arc;

use super::SearchError;
use crate::eval::{simplify, substitute, Binding};
use crate::model::{Action, Expr, ExprKind, GroundFluent, Problem, Type, Value};
use crate::pipeline::FeatureSet;

/// Packed state: one integer per ground fluent (bools as 0/1, objects as
/// their index within their type).
pub type Packed = Vec<i64>;

#[derive(Clone, Debug)]
pub(crate) enum G {
    Const(i64),
    Slot(usize),
    Not(Box<G>),
    And(Vec<G>),
    Or(Vec<G>),
    Eq(Box<G>, Box<G>),
    Le(Box<G>, Box<G>),
    Lt(Box<G>, Box<G>),
    Plus(Vec<G>),
    Minus(Box<G>, Box<G>),
    Times(Vec<G>),
}

impl G {
    pub(crate) fn eval(&self, s: &[i64]) -> Option<i64> {
        Some(match self {
            G::Const(v) => *v,
            G::Slot(i) => s[*i],
            G::Not(x) => (x.eval(s)? == 0) as i64,
            G::And(xs) => {
                for x in xs {
                    if x.eval(s)? == 0 {
                        return Some(0);
                    }
                }
                1
            }
            G::Or(xs) => {
                for x in xs {
                    if x.eval(s)? != 0 {
                        return Some(1);
                    }
                }
                0
            }
            G::Eq(a, b) => (a.eval(s)? == b.eval(s)?) as i64,
            G::Le(a, b) => (a.eval(s)? <= b.eval(s)?) as i64,
            G::Lt(a, b) => (a.eval(s)? < b.eval(s)?) as i64,
            G::Plus(xs) => xs.iter().try_fold(0i64, |acc, x| acc.checked_add(x.eval(s)?))?,
            G::Minus(a, b) => a.eval(s)?.checked_sub(b.eval(s)?)?,
            G::Times(xs) => xs.iter().try_fold(1i64, |acc, x| acc.checked_mul(x.eval(s)?))?,
        })
    }

    fn holds(&self, s: &[i64]) -> bool {
        self.eval(s).is_some_and(|v| v != 0)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct GroundEffect {
    condition: Option<G>,
    slot: usize,
    value: G,
}

/// Fully instantiated action over packed states.
#[derive(Clone, Debug)]
pub struct GroundAction {
    pub name: Arc<str>,
    pub args: Vec<(String, Value)>,
    preconditions: Vec<G>,
    effects: Vec<GroundEffect>,
}

/// A classical problem lowered to packed states.
#[derive(Clone, Debug)]
pub struct GroundTask {
    pub slots: Vec<GroundFluent>,
    slot_index: BTreeMap<GroundFluent, usize>,
    bounds: Vec<(i64, i64)>,
    slot_types: Vec<Type>,
    objects: BTreeMap<Arc<str>, (Arc<str>, i64)>,
    type_objects: BTreeMap<Arc<str>, Vec<Arc<str>>>,
    pub actions: Vec<GroundAction>,
    goals: Vec<G>,
    initial: Packed,
}

impl GroundTask {
    /// Lowers a problem free of integer parameters, arrays and Count.
    pub fn new(problem: &Problem) -> Result<GroundTask, SearchError> {
        let features = FeatureSet::of(problem);
        if !features.is_empty() {
            return Err(SearchError::HighLevel(features.to_string()));
        }
        let mut objects = BTreeMap::new();
        let mut type_objects = BTreeMap::new();
        for t in problem.types() {
            for (i, o) in t.objects.iter().enumerate() {
                objects.insert(o.clone(), (t.name.clone(), i as i64));
            }
            type_objects.insert(t.name.clone(), t.objects.clone());
        }
        let slots = problem.ground_fluents()?;
        let slot_index = slots
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        let mut bounds = Vec::new();
        let mut slot_types = Vec::new();
        for g in &slots {
            let ty = problem
                .fluent(&g.name)
                .expect("ground fluent is declared")
                .value_type
                .clone();
            bounds.push(match &ty {
                Type::Bool => (0, 1),
                Type::Int { lower, upper } => (*lower, *upper),
                Type::User(name) => (0, problem.user_type(name).map_or(0, |t| t.objects.len()) as i64 - 1),
                Type::Array { .. } => unreachable!("arrays were rejected"),
            });
            slot_types.push(ty);
        }
        let mut task = GroundTask {
            slots,
            slot_index,
            bounds,
            slot_types,
            objects,
            type_objects,
            actions: Vec::new(),
            goals: Vec::new(),
            initial: Vec::new(),
        };

        let init = problem.initial_state()?;
        task.initial = task.pack(&init)?;
        for g in problem.goals() {
            task.goals.push(task.lower(&simplify(g))?);
        }
        for a in problem.actions() {
            for args in problem.signature_groundings(&a.params)? {
                if let Some(ga) = task.ground_action(a, &args)? {
                    task.actions.push(ga);
                }
            }
        }
        task.actions.sort_by(|x, y| {
            (&x.name, arg_key(&x.args)).cmp(&(&y.name, arg_key(&y.args)))
        });
        Ok(task)
    }

    pub fn initial(&self) -> &Packed {
        &self.initial
    }

    pub fn is_goal(&self, s: &[i64]) -> bool {
        self.goals.iter().all(|g| g.holds(s))
    }

    /// Number of unsatisfied goal conjuncts.
    pub fn goal_distance(&self, s: &[i64]) -> usize {
        self.goals
            .iter()
            .map(|g| match g {
                G::And(xs) => xs.iter().filter(|x| !x.holds(s)).count(),
                g => !g.holds(s) as usize,
            })
            .sum()
    }

    /// Successor of `s` under action `index`, or `None` if inapplicable.
    pub fn apply(&self, index: usize, s: &[i64]) -> Option<Packed> {
        let a = &self.actions[index];
        if !a.preconditions.iter().all(|p| p.holds(s)) {
            return None;
        }
        let mut writes: Vec<(usize, i64)> = Vec::with_capacity(a.effects.len());
        for e in &a.effects {
            if let Some(c) = &e.condition {
                if !c.holds(s) {
                    continue;
                }
            }
            let v = e.value.eval(s)?;
            let (lo, hi) = self.bounds[e.slot];
            if v < lo || v > hi {
                return None;
            }
            match writes.iter().find(|(slot, _)| *slot == e.slot) {
                Some((_, old)) if *old != v => return None,
                Some(_) => {}
                None => writes.push((e.slot, v)),
            }
        }
        let mut next = s.to_vec();
        for (slot, v) in writes {
            next[slot] = v;
        }
        Some(next)
    }

    pub fn successors<'a>(&'a self, s: &'a [i64]) -> impl Iterator<Item = (usize, Packed)> + 'a {
        (0..self.actions.len()).filter_map(move |i| self.apply(i, s).map(|n| (i, n)))
    }

    /// Converts a high-level state into packed form.
    pub fn pack(&self, state: &crate::model::State) -> Result<Packed, SearchError> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let v = state
                    .get(g)
                    .ok_or_else(|| SearchError::Lowering(format!("no value for {g}")))?;
                self.encode(v, &self.slot_types[i])
            })
            .collect()
    }

    /// Value held by `slot` in packed state `s`.
    pub fn decode(&self, slot: usize, s: &[i64]) -> Value {
        match &self.slot_types[slot] {
            Type::Bool => Value::Bool(s[slot] != 0),
            Type::User(t) => Value::Object(self.type_objects[t][s[slot] as usize].clone()),
            _ => Value::Int(s[slot]),
        }
    }

    pub fn slot(&self, fluent: &GroundFluent) -> Option<usize> {
        self.slot_index.get(fluent).copied()
    }

    fn encode(&self, v: &Value, ty: &Type) -> Result<i64, SearchError> {
        match (v, ty) {
            (Value::Bool(b), _) => Ok(*b as i64),
            (Value::Int(i), _) => Ok(*i),
            (Value::Object(o), _) => self
                .objects
                .get(o)
                .map(|(_, i)| *i)
                .ok_or_else(|| SearchError::Lowering(format!("unknown object {o}"))),
            (Value::Array(_), _) => Err(SearchError::Lowering("array value in flat problem".into())),
        }
    }

    fn ground_action(
        &self,
        action: &Action,
        args: &[Arc<str>],
    ) -> Result<Option<GroundAction>, SearchError> {
        let mut binding = Binding::new();
        let mut named = Vec::new();
        for (p, o) in action.params.iter().zip(args) {
            binding.insert(&p.name, Value::Object(o.clone()));
            named.push((p.name.to_string(), Value::Object(o.clone())));
        }
        let ground = |e: &Expr| -> Result<Expr, SearchError> { Ok(simplify(&substitute(e, &binding)?)) };
        let mut preconditions = Vec::new();
        for p in &action.preconditions {
            let p = ground(p)?;
            match p.as_bool() {
                Some(true) => {}
                Some(false) => return Ok(None),
                None => preconditions.push(self.lower(&p)?),
            }
        }
        let mut effects = Vec::new();
        for e in &action.effects {
            let condition = match &e.condition {
                None => None,
                Some(c) => match ground(c)? {
                    c if c.as_bool() == Some(true) => None,
                    c if c.as_bool() == Some(false) => continue,
                    c => Some(self.lower(&c)?),
                },
            };
            let target = ground(&e.target)?;
            let slot = self.slot_of(&target)?;
            effects.push(GroundEffect {
                condition,
                slot,
                value: self.lower(&ground(&e.value)?)?,
            });
        }
        Ok(Some(GroundAction {
            name: action.name.clone(),
            args: named,
            preconditions,
            effects,
        }))
    }

    fn slot_of(&self, access: &Expr) -> Result<usize, SearchError> {
        let f = access
            .as_fluent()
            .ok_or_else(|| SearchError::Lowering(format!("`{access}` is not a fluent")))?;
        let args = f
            .args
            .iter()
            .map(|a| match a.kind() {
                ExprKind::Object(o) => Ok(o.clone()),
                _ => Err(SearchError::Lowering(format!("open argument in `{access}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let key = GroundFluent {
            name: f.name.clone(),
            args,
        };
        self.slot(&key)
            .ok_or_else(|| SearchError::Lowering(format!("unknown fluent {key}")))
    }

    fn lower(&self, e: &Expr) -> Result<G, SearchError> {
        use ExprKind::*;
        let bx = |x: &Expr| self.lower(x).map(Box::new);
        let all = |xs: &[Expr]| xs.iter().map(|x| self.lower(x)).collect::<Result<Vec<_>, _>>();
        Ok(match e.kind() {
            Bool(b) => G::Const(*b as i64),
            Int(i) => G::Const(*i),
            Object(o) => G::Const(
                self.objects
                    .get(o)
                    .map(|(_, i)| *i)
                    .ok_or_else(|| SearchError::Lowering(format!("unknown object {o}")))?,
            ),
            Param(p) => return Err(SearchError::Lowering(format!("unbound parameter {p}"))),
            Fluent(_) => G::Slot(self.slot_of(e)?),
            Not(x) => G::Not(bx(x)?),
            And(xs) => G::And(all(xs)?),
            Or(xs) => G::Or(all(xs)?),
            Implies(a, b) => G::Or(vec![G::Not(bx(a)?), self.lower(b)?]),
            Iff(a, b) | Equals(a, b) => G::Eq(bx(a)?, bx(b)?),
            Le(a, b) => G::Le(bx(a)?, bx(b)?),
            Lt(a, b) => G::Lt(bx(a)?, bx(b)?),
            Ge(a, b) => G::Le(bx(b)?, bx(a)?),
            Gt(a, b) => G::Lt(bx(b)?, bx(a)?),
            Plus(xs) => G::Plus(all(xs)?),
            Minus(a, b) => G::Minus(bx(a)?, bx(b)?),
            Times(xs) => G::Times(all(xs)?),
            Array(_) | Count(_) => return Err(SearchError::HighLevel(e.to_string())),
        })
    }
}

fn arg_key(args: &[(String, Value)]) -> Vec<String> {
    args.iter().map(|(_, v)| v.to_string()).collect()
}
