use std::collections::BTreeSet;

use super::{identity_map, CompilationResult, CompileError, UndefinednessMode};
use crate::eval::simplify;
use crate::model::{Action, Effect, Expr, ExprKind, Fluent, FluentAccess, InitialValue, Problem};

/// Replaces every array-typed fluent by one scalar fluent per cell, named
/// `<fluent>_<i>_..._<k>`.
///
/// Runs in two steps. First, out-of-range accesses are resolved on the
/// original expressions according to `mode`; then constant-index accesses
/// are renamed and array (in)equalities decomposed cell by cell. All index
/// expressions must be constant after simplification, so integer parameters
/// have to be grounded beforehand.
pub fn flatten_arrays(
    problem: &Problem,
    mode: UndefinednessMode,
) -> Result<CompilationResult, CompileError> {
    check_no_int_params(problem)?;
    let mut notes = Vec::new();
    let mut parts = problem.parts().clone();

    let mut names: BTreeSet<String> = problem.fluents().iter().map(|f| f.name.to_string()).collect();
    let mut fluents = Vec::new();
    for f in problem.fluents() {
        if !f.value_type.is_array() {
            fluents.push(f.clone());
            continue;
        }
        names.remove(&*f.name);
        for path in row_major(&f.value_type.dims()) {
            let name = cell_name(&f.name, &path);
            if !names.insert(name.clone()) {
                return Err(CompileError::NameCollision(name));
            }
            let mut cell = Fluent::new(&name, f.params.clone(), f.value_type.base().clone());
            cell.default = f.default.as_ref().and_then(|d| d.at(&path)).cloned();
            fluents.push(cell);
        }
    }

    let mut init = Vec::new();
    for iv in problem.init() {
        let fluent = problem
            .fluent(&iv.fluent)
            .ok_or_else(|| CompileError::Internal(format!("unknown fluent {}", iv.fluent)))?;
        if !fluent.value_type.is_array() {
            init.push(iv.clone());
            continue;
        }
        for (suffix, value) in iv.value.cells() {
            let mut path = iv.indices.clone();
            path.extend(suffix);
            init.push(InitialValue {
                fluent: cell_name(&iv.fluent, &path).into(),
                args: iv.args.clone(),
                indices: Vec::new(),
                value: value.clone(),
            });
        }
    }

    let mut goals = Vec::new();
    for g in problem.goals() {
        let g = condition(g, mode, "goal", &mut notes)?;
        let g = simplify(&flatten(&g)?);
        if g.as_bool() != Some(true) {
            goals.push(g);
        }
    }

    let mut actions = Vec::new();
    for action in problem.actions() {
        if let Some(a) = lower_action(action, mode, &mut notes)? {
            actions.push(a);
        }
    }

    parts.fluents = fluents;
    parts.init = init;
    parts.goals = goals;
    parts.actions = actions;
    let compiled = Problem::from_parts(parts)?;
    Ok(CompilationResult {
        action_map: identity_map(&compiled),
        compiled,
        notes,
    })
}

fn check_no_int_params(problem: &Problem) -> Result<(), CompileError> {
    for action in problem.actions() {
        let Some(p) = action.params.iter().find(|p| p.ty.is_int()) else {
            continue;
        };
        let mut exprs: Vec<&Expr> = action.preconditions.iter().collect();
        for e in &action.effects {
            exprs.extend([&e.target, &e.value]);
            exprs.extend(e.condition.iter());
        }
        let witness = exprs
            .iter()
            .flat_map(|e| e.fluent_accesses())
            .find(|a| {
                a.as_fluent()
                    .is_some_and(|f| f.indices.iter().any(|i| i.params().contains(&p.name)))
            })
            .map(|a| format!(" in {a}"))
            .unwrap_or_default();
        return Err(CompileError::OrderViolation(format!(
            "undefined value of {}{witness} (action {}): ground integer parameters before flattening arrays",
            p.name, action.name
        )));
    }
    Ok(())
}

fn lower_action(
    action: &Action,
    mode: UndefinednessMode,
    notes: &mut Vec<String>,
) -> Result<Option<Action>, CompileError> {
    let context = format!("action {}", action.name);

    // Effects first: an undefined target or value removes the whole action.
    let mut effects = Vec::new();
    for eff in &action.effects {
        let target = simplify(&eff.target);
        let value = simplify(&eff.value);
        for e in [&target, &value] {
            check_constant_indices(e)?;
            if let Some(access) = first_out_of_range(e) {
                match mode {
                    UndefinednessMode::Restrictive => {
                        return Err(CompileError::UndefinedAccess {
                            access,
                            context: format!("effect of {context}"),
                        })
                    }
                    UndefinednessMode::Permissive => {
                        notes.push(format!(
                            "dropped {context}: undefined array access {access} in effect `{eff}`"
                        ));
                        return Ok(None);
                    }
                }
            }
        }
        let cond = match &eff.condition {
            None => None,
            Some(c) => {
                let c = condition(c, mode, &format!("effect condition of {context}"), notes)?;
                let c = simplify(&flatten(&c)?);
                match c.as_bool() {
                    Some(false) => continue,
                    Some(true) => None,
                    None => Some(c),
                }
            }
        };
        let targets = cells(&target)?;
        let values = cells(&value)?;
        if targets.len() != values.len() {
            return Err(CompileError::Internal(format!(
                "shape mismatch in effect `{eff}`"
            )));
        }
        for (t, v) in targets.into_iter().zip(values) {
            let v = simplify(&v);
            effects.push(match &cond {
                None => Effect::new(t, v)?,
                Some(c) => Effect::conditional(c.clone(), t, v)?,
            });
        }
    }

    let mut preconditions = Vec::new();
    for pre in &action.preconditions {
        let p = condition(pre, mode, &format!("precondition of {context}"), notes)?;
        let p = simplify(&flatten(&p)?);
        match p.as_bool() {
            Some(true) => {}
            Some(false) => {
                notes.push(format!("{context}: precondition is false; kept but never applicable"));
                preconditions = vec![Expr::bool(false)];
                break;
            }
            None => preconditions.push(p),
        }
    }

    Ok(Some(Action {
        name: action.name.clone(),
        params: action.params.clone(),
        preconditions,
        effects,
    }))
}

/// Resolves undefined accesses in a Boolean condition according to `mode`.
fn condition(
    e: &Expr,
    mode: UndefinednessMode,
    context: &str,
    notes: &mut Vec<String>,
) -> Result<Expr, CompileError> {
    let e = simplify(e);
    check_constant_indices(&e)?;
    let Some(access) = first_out_of_range(&e) else {
        return Ok(e);
    };
    match mode {
        UndefinednessMode::Restrictive => Err(CompileError::UndefinedAccess {
            access,
            context: context.to_string(),
        }),
        UndefinednessMode::Permissive => {
            notes.push(format!(
                "{context}: undefined array access {access} folded to false"
            ));
            fold_out_of_range(&e)
        }
    }
}

/// Replaces the nearest Boolean ancestor of every out-of-range array access
/// (constant indices only) by `false`. The result is not simplified.
pub fn fold_out_of_range(e: &Expr) -> Result<Expr, CompileError> {
    match fold_rec(e)? {
        Ok(folded) => Ok(folded),
        Err(access) => Err(CompileError::UndefinedAccess {
            access,
            context: format!("non-Boolean expression `{e}`"),
        }),
    }
}

fn fold_rec(e: &Expr) -> Result<Result<Expr, String>, CompileError> {
    let result = if is_out_of_range(e) {
        Err(e.to_string())
    } else {
        let mut undefined = None;
        let mut children = Vec::new();
        for c in e.children() {
            match fold_rec(c)? {
                Ok(x) => children.push(x),
                Err(access) => {
                    undefined = Some(access);
                    break;
                }
            }
        }
        match undefined {
            Some(access) => Err(access),
            None if children.is_empty() => Ok(e.clone()),
            None => Ok(e.with_children(children)?),
        }
    };
    Ok(match result {
        Err(_) if e.ty().is_bool() => Ok(Expr::bool(false)),
        other => other,
    })
}

fn is_out_of_range(e: &Expr) -> bool {
    let Some(access) = e.as_fluent() else {
        return false;
    };
    let dims = access.value_type.dims();
    access
        .indices
        .iter()
        .zip(&dims)
        .any(|(i, &d)| matches!(i.as_int(), Some(v) if v < 0 || v as usize >= d))
}

fn first_out_of_range(e: &Expr) -> Option<String> {
    let mut found = None;
    e.walk(&mut |n| {
        if found.is_none() && is_out_of_range(n) {
            found = Some(n.to_string());
        }
    });
    found
}

fn check_constant_indices(e: &Expr) -> Result<(), CompileError> {
    for a in e.fluent_accesses() {
        let access = a.as_fluent().expect("fluent access");
        if access.indices.iter().any(|i| i.as_int().is_none()) {
            return Err(CompileError::NonConstantIndex {
                access: a.to_string(),
            });
        }
    }
    Ok(())
}

/// Renames in-range constant accesses and decomposes array comparisons.
fn flatten(e: &Expr) -> Result<Expr, CompileError> {
    match e.kind() {
        ExprKind::Equals(a, b) | ExprKind::Iff(a, b) if a.ty().is_array() => {
            let is_iff = matches!(e.kind(), ExprKind::Iff(..));
            let conjuncts = cells(a)?
                .into_iter()
                .zip(cells(b)?)
                .map(|(x, y)| if is_iff { Expr::iff(x, y) } else { Expr::equals(x, y) })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Expr::and(conjuncts)?)
        }
        ExprKind::Fluent(_) if e.ty().is_array() => Err(CompileError::Internal(format!(
            "array-valued access `{e}` outside a comparison or assignment"
        ))),
        ExprKind::Fluent(access) if !access.indices.is_empty() => {
            let path: Vec<usize> = access
                .indices
                .iter()
                .map(|i| i.as_int().map(|v| v as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| CompileError::NonConstantIndex {
                    access: e.to_string(),
                })?;
            scalar_cell(e, &path)
        }
        _ => e.try_map_children(flatten),
    }
}

fn scalar_cell(access_expr: &Expr, path: &[usize]) -> Result<Expr, CompileError> {
    let access = access_expr.as_fluent().expect("fluent access");
    let cell = Fluent::new(
        &cell_name(&access.name, path),
        Vec::new(),
        access.value_type.base().clone(),
    );
    Ok(Expr::new(ExprKind::Fluent(FluentAccess {
        name: cell.name,
        value_type: cell.value_type,
        args: access.args.clone(),
        indices: Vec::new(),
    }))?)
}

/// Scalar cells of an expression in row-major order (a scalar yields itself).
fn cells(e: &Expr) -> Result<Vec<Expr>, CompileError> {
    if !e.ty().is_array() {
        return Ok(vec![flatten(e)?]);
    }
    match e.kind() {
        ExprKind::Fluent(access) => {
            let prefix: Vec<usize> = access
                .indices
                .iter()
                .map(|i| i.as_int().map(|v| v as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| CompileError::NonConstantIndex {
                    access: e.to_string(),
                })?;
            row_major(&e.ty().dims())
                .into_iter()
                .map(|suffix| {
                    let mut path = prefix.clone();
                    path.extend(suffix);
                    scalar_cell(e, &path)
                })
                .collect()
        }
        ExprKind::Array(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(cells(item)?);
            }
            Ok(out)
        }
        _ => Err(CompileError::Internal(format!(
            "cannot decompose array expression `{e}`"
        ))),
    }
}

pub(crate) fn cell_name(name: &str, path: &[usize]) -> String {
    let mut out = name.to_string();
    for i in path {
        out.push('_');
        out.push_str(&i.to_string());
    }
    out
}

/// All index paths of an array with the given dimensions, row-major.
pub(crate) fn row_major(dims: &[usize]) -> Vec<Vec<usize>> {
    dims.iter().fold(vec![Vec::new()], |acc, &d| {
        acc.into_iter()
            .flat_map(|p| {
                (0..d).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::ground_int_params;
    use crate::model::{Type, Value};

    fn my_ints() -> Fluent {
        Fluent::new(
            "my_ints",
            vec![],
            Type::array(3, Type::int(0, 9).unwrap()).unwrap(),
        )
    }

    /// `Or(my_ints[i+1] == 0, my_ints[i] == 0)` for `i` in [0, 2].
    fn neighbour_problem() -> Problem {
        let mut pb = Problem::builder("neighbours");
        let f = pb
            .add_fluent(my_ints().with_default(Value::filled(&[3], &Value::Int(1))))
            .unwrap();
        let done = pb.fluent("done", &[], Type::Bool).unwrap();
        let mut a = Action::builder("check");
        let i = a.int_param("i", 0, 2).unwrap();
        let next = Expr::plus(vec![i.clone(), Expr::int(1)]).unwrap();
        a.precondition(
            Expr::or(vec![
                Expr::equals(f.cell(vec![next]).unwrap(), Expr::int(0)).unwrap(),
                Expr::equals(f.cell(vec![i]).unwrap(), Expr::int(0)).unwrap(),
            ])
            .unwrap(),
        )
        .unwrap();
        a.effect(done.get().unwrap(), Expr::bool(true)).unwrap();
        pb.add_action(a.build().unwrap()).unwrap();
        pb.add_goal(done.get().unwrap()).unwrap();
        pb.build().unwrap()
    }

    #[test]
    fn folding_keeps_expression_shape() {
        let f = my_ints();
        let e = Expr::or(vec![
            Expr::equals(f.at(&[3]).unwrap(), Expr::int(0)).unwrap(),
            Expr::equals(f.at(&[2]).unwrap(), Expr::int(0)).unwrap(),
        ])
        .unwrap();
        let folded = fold_out_of_range(&e).unwrap();
        assert_eq!(folded.to_string(), "Or(false, Equals(my_ints[2], 0))");
        assert_eq!(simplify(&folded).to_string(), "Equals(my_ints[2], 0)");
    }

    #[test]
    fn permissive_flattening_of_boundary_action() {
        let grounded = ground_int_params(&neighbour_problem()).unwrap().compiled;
        let result = flatten_arrays(&grounded, UndefinednessMode::Permissive).unwrap();
        let a = result.compiled.action("check_2").unwrap();
        assert_eq!(a.preconditions.len(), 1);
        assert_eq!(a.preconditions[0].to_string(), "Equals(my_ints_2, 0)");
        assert!(result.notes.iter().any(|n| n.contains("my_ints[3]")));
        let names: Vec<&str> = result.compiled.fluents().iter().map(|f| &*f.name).collect();
        assert_eq!(names, ["my_ints_0", "my_ints_1", "my_ints_2", "done"]);
        assert_eq!(
            result.compiled.fluent("my_ints_1").unwrap().default,
            Some(Value::Int(1))
        );
    }

    #[test]
    fn restrictive_names_the_access() {
        let grounded = ground_int_params(&neighbour_problem()).unwrap().compiled;
        let err = flatten_arrays(&grounded, UndefinednessMode::Restrictive).unwrap_err();
        assert!(err.to_string().contains("undefined array access my_ints[3]"), "{err}");
    }

    #[test]
    fn refuses_ungrounded_int_params() {
        let err = flatten_arrays(&neighbour_problem(), UndefinednessMode::Permissive).unwrap_err();
        assert!(matches!(err, CompileError::OrderViolation(_)));
        assert!(err.to_string().contains("undefined value of i"), "{err}");
    }

    #[test]
    fn array_equality_decomposes() {
        let mut pb = Problem::builder("eq");
        let grid = Type::array_of(&[2, 2], Type::int(0, 3).unwrap()).unwrap();
        let g = pb.fluent("g", &[], grid).unwrap();
        pb.set_default(&g, Value::filled(&[2, 2], &Value::Int(0))).unwrap();
        let target = Value::Array(vec![
            Value::Array(vec![1i64.into(), 2i64.into()]),
            Value::Array(vec![3i64.into(), 0i64.into()]),
        ]);
        let lit = Expr::constant(&target, g.get().unwrap().ty()).unwrap();
        pb.add_goal(Expr::equals(g.get().unwrap(), lit).unwrap()).unwrap();
        let mut a = Action::builder("swap_row");
        a.effect(g.at(&[0]).unwrap(), g.at(&[1]).unwrap()).unwrap();
        pb.add_action(a.build().unwrap()).unwrap();
        let result = flatten_arrays(&pb.build().unwrap(), UndefinednessMode::Restrictive).unwrap();
        assert_eq!(
            result.compiled.goals()[0].to_string(),
            "And(Equals(g_0_0, 1), Equals(g_0_1, 2), Equals(g_1_0, 3), Equals(g_1_1, 0))"
        );
        let effects: Vec<String> = result.compiled.actions()[0]
            .effects
            .iter()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(effects, ["g_0_0 := g_1_0", "g_0_1 := g_1_1"]);
    }

    #[test]
    fn undefined_effect_drops_action() {
        let mut pb = Problem::builder("drop");
        let f = pb.add_fluent(my_ints().with_default(Value::filled(&[3], &Value::Int(0)))).unwrap();
        let mut a = Action::builder("poke");
        a.effect(f.at(&[5]).unwrap(), Expr::int(1)).unwrap();
        pb.add_action(a.build().unwrap()).unwrap();
        let p = pb.build().unwrap();
        let result = flatten_arrays(&p, UndefinednessMode::Permissive).unwrap();
        assert!(result.compiled.actions().is_empty());
        assert!(result.notes[0].contains("my_ints[5]"));
        assert!(flatten_arrays(&p, UndefinednessMode::Restrictive).is_err());
    }

    #[test]
    fn row_major_order() {
        assert_eq!(
            row_major(&[2, 2]),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }
}
