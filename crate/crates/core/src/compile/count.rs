use std::collections::{BTreeMap, BTreeSet};

use super::{identity_map, CompilationResult, CompileError};
use crate::eval::{evaluate_bool, replace_fluents, simplify, Binding, OutOfRange};
use crate::model::{
    Action, Effect, Expr, ExprKind, Fluent, InitialValue, Problem, Type, Value,
};

/// Largest number of distinct write conditions case-split for one counter.
const MAX_CASES: usize = 10;

/// Replaces every `Count(e1, ..., en)` by a sum of fresh 0/1 integer fluents
/// `count_k`, one per distinct argument expression.
///
/// Counters are allocated in order of first occurrence, goals before
/// actions, skipping names already taken. Each action that writes a fluent
/// read by argument `e_k` gets effects resetting `count_k` to the truth of
/// `e_k` in the successor state, expressed over the current state.
pub fn remove_counts(problem: &Problem) -> Result<CompilationResult, CompileError> {
    for f in problem.fluents() {
        if f.value_type.is_array() {
            return Err(CompileError::OrderViolation(format!(
                "array fluent `{}` must be flattened before Count removal",
                f.name
            )));
        }
    }
    if let Some(a) = problem.actions().iter().find(|a| a.has_int_params()) {
        return Err(CompileError::OrderViolation(format!(
            "action `{}` has integer parameters; ground them before Count removal",
            a.name
        )));
    }

    let mut alloc = Allocator::new(problem);
    for g in problem.goals() {
        alloc.collect(g)?;
    }
    for a in problem.actions() {
        for e in action_exprs(a) {
            alloc.collect(e)?;
        }
    }
    if alloc.args.is_empty() {
        return Ok(CompilationResult::identity(problem));
    }

    let mut parts = problem.parts().clone();
    let state = problem.initial_state()?;
    for (arg, name) in alloc.args.iter().zip(&alloc.names) {
        let holds = evaluate_bool(arg, &state, &Binding::new(), OutOfRange::Error)?;
        parts.fluents.push(counter(name));
        parts.init.push(InitialValue {
            fluent: name.as_str().into(),
            args: Vec::new(),
            indices: Vec::new(),
            value: Value::Int(holds as i64),
        });
    }

    parts.goals = problem
        .goals()
        .iter()
        .map(|g| alloc.replace(g))
        .collect::<Result<_, _>>()?;

    let mut actions = Vec::new();
    for a in problem.actions() {
        actions.push(compile_action(a, &alloc)?);
    }
    parts.actions = actions;

    let compiled = Problem::from_parts(parts)?;
    let leftover = compiled.goals().iter().any(Expr::has_count)
        || compiled
            .actions()
            .iter()
            .any(|a| action_exprs(a).into_iter().any(Expr::has_count));
    if leftover {
        return Err(CompileError::Internal("Count survived compilation".into()));
    }
    Ok(CompilationResult {
        action_map: identity_map(&compiled),
        compiled,
        notes: Vec::new(),
    })
}

fn counter(name: &str) -> Fluent {
    Fluent::new(name, Vec::new(), Type::Int { lower: 0, upper: 1 }).with_default(0i64)
}

fn action_exprs(a: &Action) -> Vec<&Expr> {
    let mut out: Vec<&Expr> = a.preconditions.iter().collect();
    for e in &a.effects {
        out.extend(e.condition.iter());
        out.push(&e.value);
    }
    out
}

struct Allocator {
    taken: BTreeSet<String>,
    next: usize,
    args: Vec<Expr>,
    names: Vec<String>,
    index: BTreeMap<Expr, usize>,
}

impl Allocator {
    fn new(problem: &Problem) -> Allocator {
        Allocator {
            taken: problem.fluents().iter().map(|f| f.name.to_string()).collect(),
            next: 0,
            args: Vec::new(),
            names: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    fn collect(&mut self, e: &Expr) -> Result<(), CompileError> {
        if let ExprKind::Count(xs) = e.kind() {
            for x in xs {
                if x.has_count() {
                    return Err(CompileError::NestedCount(e.to_string()));
                }
                if !x.is_closed() {
                    return Err(CompileError::CountNotClosed(x.to_string()));
                }
                if !self.index.contains_key(x) {
                    let name = loop {
                        let candidate = format!("count_{}", self.next);
                        self.next += 1;
                        if !self.taken.contains(&candidate) {
                            break candidate;
                        }
                    };
                    self.index.insert(x.clone(), self.args.len());
                    self.args.push(x.clone());
                    self.names.push(name);
                }
            }
            return Ok(());
        }
        for c in e.children() {
            self.collect(c)?;
        }
        Ok(())
    }

    fn fluent(&self, k: usize) -> Expr {
        counter(&self.names[k]).get().expect("counter access")
    }

    fn replace(&self, e: &Expr) -> Result<Expr, CompileError> {
        if let ExprKind::Count(xs) = e.kind() {
            let mut terms: Vec<Expr> = xs.iter().map(|x| self.fluent(self.index[x])).collect();
            return Ok(match terms.len() {
                0 => Expr::int(0),
                1 => terms.pop().unwrap(),
                _ => Expr::plus(terms)?,
            });
        }
        e.try_map_children(|c| self.replace(c))
    }
}

/// A write that may change the value of a fluent read by a count argument.
struct Write {
    condition: Expr,
    read: Expr,
    value: Expr,
}

fn compile_action(action: &Action, alloc: &Allocator) -> Result<Action, CompileError> {
    let mut out = Action {
        name: action.name.clone(),
        params: action.params.clone(),
        preconditions: action
            .preconditions
            .iter()
            .map(|p| alloc.replace(p))
            .collect::<Result<_, _>>()?,
        effects: Vec::new(),
    };
    for eff in &action.effects {
        out.effects.push(Effect {
            target: eff.target.clone(),
            value: alloc.replace(&eff.value)?,
            condition: eff.condition.as_ref().map(|c| alloc.replace(c)).transpose()?,
        });
    }

    // Two unconditional writes to the same fluent can never be applied.
    let mut unconditional = BTreeSet::new();
    for eff in &out.effects {
        if eff.condition.is_none() && !unconditional.insert(&eff.target) {
            return Err(CompileError::ConflictingEffects {
                action: action.name.to_string(),
                target: eff.target.to_string(),
            });
        }
    }

    let mut counter_effects = Vec::new();
    for (k, arg) in alloc.args.iter().enumerate() {
        let writes = relevant_writes(&out.effects, arg)?;
        if writes.is_empty() {
            continue;
        }
        counter_effects.extend(maintain(alloc.fluent(k), arg, &writes)?);
    }
    out.effects.extend(counter_effects);
    Ok(out)
}

fn relevant_writes(effects: &[Effect], arg: &Expr) -> Result<Vec<Write>, CompileError> {
    let reads: BTreeSet<&Expr> = arg.fluent_accesses().into_iter().collect();
    let mut writes = Vec::new();
    for eff in effects {
        let target = eff.target.as_fluent().expect("effect target is a fluent");
        for read in &reads {
            let access = read.as_fluent().expect("fluent access");
            if access.name != target.name {
                continue;
            }
            let mut conjuncts: Vec<Expr> = eff.condition.iter().cloned().collect();
            for (t, r) in target.args.iter().zip(&access.args) {
                conjuncts.push(Expr::equals(t.clone(), r.clone())?);
            }
            let condition = simplify(&Expr::and(conjuncts)?);
            if condition.as_bool() == Some(false) {
                continue;
            }
            writes.push(Write {
                condition,
                read: (*read).clone(),
                value: eff.value.clone(),
            });
        }
    }
    Ok(writes)
}

/// Effects keeping `count := [arg]` true after the action.
///
/// Writes are grouped by condition; for every non-empty set `S` of
/// conditions that hold together, the post-state value of `arg` is `arg` with
/// the reads written under `S` replaced by the written values.
fn maintain(count: Expr, arg: &Expr, writes: &[Write]) -> Result<Vec<Effect>, CompileError> {
    let mut conditions: Vec<&Expr> = Vec::new();
    for w in writes {
        if !conditions.contains(&&w.condition) {
            conditions.push(&w.condition);
        }
    }
    if conditions.len() > MAX_CASES {
        return Err(CompileError::Internal(format!(
            "too many conditional writes affecting Count argument `{arg}`"
        )));
    }

    let mut effects = Vec::new();
    for mask in 1u32..(1 << conditions.len()) {
        let mut guard = Vec::new();
        for (i, c) in conditions.iter().enumerate() {
            let c = (*c).clone();
            guard.push(if mask & (1 << i) != 0 { c } else { Expr::not(c)? });
        }
        let guard = simplify(&Expr::and(guard)?);
        if guard.as_bool() == Some(false) {
            continue;
        }
        let mut replacements = BTreeMap::new();
        for w in writes {
            let i = conditions.iter().position(|c| *c == &w.condition).unwrap();
            if mask & (1 << i) != 0 {
                replacements.insert(w.read.clone(), w.value.clone());
            }
        }
        let post = simplify(&replace_fluents(arg, &replacements)?);
        match post.as_bool() {
            Some(b) => effects.push(guarded(&guard, &count, Expr::int(b as i64))?),
            None => {
                let holds = simplify(&Expr::and(vec![guard.clone(), post.clone()])?);
                let fails = simplify(&Expr::and(vec![guard.clone(), Expr::not(post)?])?);
                effects.push(guarded(&holds, &count, Expr::int(1))?);
                effects.push(guarded(&fails, &count, Expr::int(0))?);
            }
        }
    }
    Ok(effects)
}

fn guarded(condition: &Expr, target: &Expr, value: Expr) -> Result<Effect, CompileError> {
    Ok(match condition.as_bool() {
        Some(true) => Effect::new(target.clone(), value)?,
        _ => Effect::conditional(condition.clone(), target.clone(), value)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::model::State;

    fn flags(pb: &mut crate::model::ProblemBuilder, names: &[&str]) -> Vec<Fluent> {
        names
            .iter()
            .map(|n| pb.fluent(n, &[], Type::Bool).unwrap())
            .collect()
    }

    #[test]
    fn counters_follow_goal_then_action_order() {
        let mut pb = Problem::builder("c");
        let fs = flags(&mut pb, &["a", "b", "count_0"]);
        pb.set_initial_value(&fs[0].get().unwrap(), true).unwrap();
        let count = Expr::count(vec![fs[0].get().unwrap(), fs[1].get().unwrap()]).unwrap();
        pb.add_goal(Expr::equals(count, Expr::int(1)).unwrap()).unwrap();
        let mut act = Action::builder("flip");
        act.effect(fs[0].get().unwrap(), Expr::bool(false)).unwrap();
        act.effect(fs[1].get().unwrap(), Expr::bool(true)).unwrap();
        pb.add_action(act.build().unwrap()).unwrap();
        let result = remove_counts(&pb.build().unwrap()).unwrap();
        let p = &result.compiled;
        assert_eq!(p.goals()[0].to_string(), "Equals(Plus(count_1, count_2), 1)");
        let init: Vec<String> = p.init().iter().map(|i| i.to_string()).collect();
        assert!(init.contains(&"count_1 := 1".to_string()));
        assert!(init.contains(&"count_2 := 0".to_string()));
        let effects: Vec<String> = p.actions()[0].effects.iter().map(|e| e.to_string()).collect();
        assert_eq!(effects[2..], ["count_1 := 0", "count_2 := 1"]);
    }

    #[test]
    fn conditional_write_produces_guarded_pair() {
        let mut pb = Problem::builder("c");
        let fs = flags(&mut pb, &["a", "b", "c"]);
        let arg = Expr::and(vec![fs[0].get().unwrap(), fs[1].get().unwrap()]).unwrap();
        pb.add_goal(Expr::ge(Expr::count(vec![arg]).unwrap(), Expr::int(1)).unwrap())
            .unwrap();
        let mut act = Action::builder("set_a_if_c");
        act.conditional_effect(fs[2].get().unwrap(), fs[0].get().unwrap(), Expr::bool(true))
            .unwrap();
        pb.add_action(act.build().unwrap()).unwrap();
        let result = remove_counts(&pb.build().unwrap()).unwrap();
        let effects: Vec<String> = result.compiled.actions()[0]
            .effects
            .iter()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(
            effects[1..],
            ["if And(b, c): count_0 := 1", "if And(c, Not(b)): count_0 := 0"]
        );
    }

    /// Applies all effects of a ground action simultaneously.
    fn apply(problem: &Problem, action: &Action, state: &State) -> State {
        let b = Binding::new();
        let mut next = state.clone();
        for e in &action.effects {
            let fire = match &e.condition {
                Some(c) => evaluate_bool(c, state, &b, OutOfRange::Error).unwrap(),
                None => true,
            };
            if fire {
                let loc = crate::eval::locate(&e.target, state, &b).unwrap();
                let v = evaluate(&e.value, state, &b).unwrap();
                *next.get_mut(&loc.fluent).unwrap() = v;
            }
        }
        let _ = problem;
        next
    }

    #[test]
    fn counters_track_their_arguments_under_random_actions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let mut pb = Problem::builder("r");
            let fs = flags(&mut pb, &["p", "q", "r", "s"]);
            let atom = |i: usize| fs[i].get().unwrap();
            for f in &fs {
                if rng.gen_bool(0.5) {
                    pb.set_initial_value(&f.get().unwrap(), true).unwrap();
                }
            }
            let args = vec![
                atom(0),
                Expr::or(vec![atom(1), atom(2)]).unwrap(),
                Expr::and(vec![atom(0), Expr::not(atom(3)).unwrap()]).unwrap(),
            ];
            pb.add_goal(Expr::ge(Expr::count(args.clone()).unwrap(), Expr::int(2)).unwrap())
                .unwrap();
            for n in 0..4 {
                let mut act = Action::builder(&format!("act{n}"));
                let mut used = BTreeSet::new();
                for _ in 0..rng.gen_range(1..4) {
                    let t = rng.gen_range(0..4);
                    if !used.insert(t) {
                        continue;
                    }
                    let value = if rng.gen_bool(0.5) {
                        Expr::bool(rng.gen_bool(0.5))
                    } else {
                        atom(rng.gen_range(0..4))
                    };
                    if rng.gen_bool(0.5) {
                        let c = atom(rng.gen_range(0..4));
                        act.conditional_effect(c, atom(t), value).unwrap();
                    } else {
                        act.effect(atom(t), value).unwrap();
                    }
                }
                pb.add_action(act.build().unwrap()).unwrap();
            }
            let source = pb.build().unwrap();
            let compiled = remove_counts(&source).unwrap().compiled;
            let mut state = compiled.initial_state().unwrap();
            for _ in 0..12 {
                let a = &compiled.actions()[rng.gen_range(0..4)];
                state = apply(&compiled, a, &state);
                for (k, arg) in args.iter().enumerate() {
                    let expected = evaluate_bool(arg, &state, &Binding::new(), OutOfRange::Error)
                        .unwrap() as i64;
                    let counter = counter(&format!("count_{k}")).get().unwrap();
                    assert_eq!(
                        evaluate(&counter, &state, &Binding::new()).unwrap(),
                        Value::Int(expected),
                        "count_{k} after {}",
                        a.name
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_open_arguments() {
        let mut pb = Problem::builder("c");
        let t = pb.user_type("T").unwrap();
        pb.object("o", &t).unwrap();
        let f = pb.fluent("f", &[("x", t.clone())], Type::Bool).unwrap();
        let mut act = Action::builder("a");
        let x = act.param("x", t).unwrap();
        act.precondition(
            Expr::ge(Expr::count(vec![f.atom(vec![x]).unwrap()]).unwrap(), Expr::int(1)).unwrap(),
        )
        .unwrap();
        pb.add_action(act.build().unwrap()).unwrap();
        assert!(matches!(
            remove_counts(&pb.build().unwrap()),
            Err(CompileError::CountNotClosed(_))
        ));
    }
}
