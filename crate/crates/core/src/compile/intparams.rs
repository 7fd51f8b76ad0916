use std::collections::{BTreeMap, BTreeSet};

use super::{ActionOrigin, CompilationResult, CompileError};
use crate::eval::{simplify, substitute, Binding};
use crate::model::{Action, Effect, Expr, Problem, Value};

/// Upper bound on integer combinations per action.
const MAX_COMBINATIONS: u128 = 1_000_000;

/// Replaces every action having bounded-integer parameters by one action per
/// combination of their values, named `<action>_<v1>_..._<vk>`.
///
/// Combinations are enumerated row-major over parameter declaration order.
/// Substituted expressions are simplified; an effect whose condition folds
/// to false is removed, and a precondition folding to false is kept (as the
/// single precondition `false`) with a note.
pub fn ground_int_params(problem: &Problem) -> Result<CompilationResult, CompileError> {
    let mut parts = problem.parts().clone();
    let mut actions = Vec::new();
    let mut action_map = BTreeMap::new();
    let mut notes = Vec::new();

    for action in problem.actions() {
        let int_params: Vec<_> = action
            .params
            .iter()
            .filter_map(|p| p.ty.int_bounds().map(|b| (p, b)))
            .collect();
        if int_params.is_empty() {
            action_map.insert(
                action.name.to_string(),
                ActionOrigin {
                    source: action.name.to_string(),
                    binding: Binding::new(),
                    params: action.params.clone(),
                },
            );
            actions.push(action.clone());
            continue;
        }

        let combinations: u128 = int_params
            .iter()
            .map(|(_, (lo, hi))| (*hi as i128 - *lo as i128 + 1) as u128)
            .product();
        if combinations > MAX_COMBINATIONS {
            return Err(CompileError::DomainTooLarge {
                action: action.name.to_string(),
                combinations,
                limit: MAX_COMBINATIONS,
            });
        }

        let kept_params: Vec<_> = action
            .params
            .iter()
            .filter(|p| !p.ty.is_int())
            .cloned()
            .collect();
        let mut values: Vec<i64> = int_params.iter().map(|(_, (lo, _))| *lo).collect();
        loop {
            let binding = int_params
                .iter()
                .zip(&values)
                .fold(Binding::new(), |b, ((p, _), v)| b.with(&p.name, Value::Int(*v)));
            let suffix: Vec<String> = values.iter().map(i64::to_string).collect();
            let name = format!("{}_{}", action.name, suffix.join("_"));
            let grounded = ground_action(action, &name, &kept_params, &binding)?;
            if grounded.preconditions.iter().any(|p| p.as_bool() == Some(false)) {
                notes.push(format!(
                    "action {name}: precondition simplifies to false; kept but never applicable"
                ));
            }
            action_map.insert(
                name,
                ActionOrigin {
                    source: action.name.to_string(),
                    binding,
                    params: action.params.clone(),
                },
            );
            actions.push(grounded);

            // Odometer step, last parameter fastest.
            let mut level = values.len();
            loop {
                if level == 0 {
                    break;
                }
                level -= 1;
                let (_, (lo, hi)) = int_params[level];
                if values[level] < hi {
                    values[level] += 1;
                    break;
                }
                values[level] = lo;
                if level == 0 {
                    level = usize::MAX;
                    break;
                }
            }
            if level == usize::MAX {
                break;
            }
        }
    }

    let mut seen = BTreeSet::new();
    for a in &actions {
        if !seen.insert(a.name.clone()) {
            return Err(CompileError::NameCollision(a.name.to_string()));
        }
    }
    parts.actions = actions;
    Ok(CompilationResult {
        compiled: Problem::from_parts(parts)?,
        action_map,
        notes,
    })
}

fn ground_action(
    action: &Action,
    name: &str,
    kept_params: &[crate::model::Param],
    binding: &Binding,
) -> Result<Action, CompileError> {
    let ground = |e: &Expr| -> Result<Expr, CompileError> { Ok(simplify(&substitute(e, binding)?)) };
    let mut preconditions = Vec::new();
    for pre in &action.preconditions {
        let p = ground(pre)?;
        match p.as_bool() {
            Some(true) => {}
            Some(false) => {
                preconditions = vec![Expr::bool(false)];
                break;
            }
            None => preconditions.push(p),
        }
    }
    let mut effects = Vec::new();
    for eff in &action.effects {
        let condition = match &eff.condition {
            None => None,
            Some(c) => match ground(c)?.as_bool() {
                Some(true) => None,
                Some(false) => continue,
                None => Some(ground(c)?),
            },
        };
        effects.push(Effect {
            target: ground(&eff.target)?,
            value: ground(&eff.value)?,
            condition,
        });
    }
    Ok(Action {
        name: name.into(),
        params: kept_params.to_vec(),
        preconditions,
        effects,
    })
}
