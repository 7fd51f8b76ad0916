use crate::model::{Expr, ExprKind};

/// Constant folding and Boolean simplification.
///
/// Rebuilds bottom-up through normalising constructors, so the result is a
/// fixpoint: `simplify(simplify(e)) == simplify(e)`. Conjunctions and
/// disjunctions are flattened, deduplicated and sorted structurally. Rules
/// that would erase an indexed fluent access (`x - x`, `x * 0`, `x = x`)
/// only fire when no such access is present, so array bounds are still
/// checked afterwards.
pub fn simplify(e: &Expr) -> Expr {
    use ExprKind::*;
    let children: Vec<Expr> = e.children().into_iter().map(simplify).collect();
    match e.kind() {
        Bool(_) | Int(_) | Object(_) | Param(_) => e.clone(),
        Fluent(_) | Array(_) => e
            .with_children(children)
            .expect("simplification preserves child types"),
        Not(_) => mk_not(one(children)),
        And(_) => mk_junction(true, children),
        Or(_) => mk_junction(false, children),
        Implies(..) => {
            let (a, b) = two(children);
            mk_implies(a, b)
        }
        Iff(..) => {
            let (a, b) = two(children);
            mk_bool_eq(a, b, Expr::iff)
        }
        Equals(..) => {
            let (a, b) = two(children);
            mk_equals(a, b)
        }
        Le(..) | Lt(..) | Ge(..) | Gt(..) => {
            let (a, b) = two(children);
            mk_compare(e.kind(), a, b)
        }
        Plus(_) => mk_plus(children),
        Minus(..) => {
            let (a, b) = two(children);
            mk_minus(a, b)
        }
        Times(_) => mk_times(children),
        Count(_) => mk_count(children),
    }
}

fn one(mut v: Vec<Expr>) -> Expr {
    v.pop().expect("unary node")
}

fn two(v: Vec<Expr>) -> (Expr, Expr) {
    let mut it = v.into_iter();
    (it.next().expect("binary node"), it.next().expect("binary node"))
}

fn has_indexed_access(e: &Expr) -> bool {
    e.any(&|n| matches!(n.kind(), ExprKind::Fluent(a) if !a.indices.is_empty()))
}

pub(crate) fn mk_not(x: Expr) -> Expr {
    if let Some(b) = x.as_bool() {
        return Expr::bool(!b);
    }
    if let ExprKind::Not(inner) = x.kind() {
        return inner.clone();
    }
    Expr::not(x).expect("bool operand")
}

/// `is_and` selects And (unit true, zero false) or Or (unit false, zero true).
fn mk_junction(is_and: bool, children: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match (c.kind(), c.as_bool()) {
            (_, Some(b)) if b == is_and => {}
            (_, Some(_)) => return Expr::bool(!is_and),
            (ExprKind::And(xs), _) if is_and => flat.extend(xs.iter().cloned()),
            (ExprKind::Or(xs), _) if !is_and => flat.extend(xs.iter().cloned()),
            _ => flat.push(c),
        }
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => Expr::bool(is_and),
        1 => flat.pop().unwrap(),
        _ if is_and => Expr::and(flat).expect("bool operands"),
        _ => Expr::or(flat).expect("bool operands"),
    }
}

fn mk_implies(a: Expr, b: Expr) -> Expr {
    match (a.as_bool(), b.as_bool()) {
        (Some(false), _) | (_, Some(true)) => Expr::bool(true),
        (Some(true), _) => b,
        (_, Some(false)) => mk_not(a),
        _ if a == b => Expr::bool(true),
        _ => Expr::implies(a, b).expect("bool operands"),
    }
}

/// Equality between two bool-typed operands, for both `Iff` and `Equals`.
fn mk_bool_eq(
    a: Expr,
    b: Expr,
    build: fn(Expr, Expr) -> Result<Expr, crate::model::ModelError>,
) -> Expr {
    if !a.ty().is_bool() {
        // Whole-array equivalence; the arrays compiler decomposes it.
        if a.is_constant() && b.is_constant() {
            return Expr::bool(a.to_value() == b.to_value());
        }
        return build(a, b).expect("compatible operands");
    }
    match (a.as_bool(), b.as_bool()) {
        (Some(x), Some(y)) => Expr::bool(x == y),
        (Some(true), None) => b,
        (None, Some(true)) => a,
        (Some(false), None) => mk_not(b),
        (None, Some(false)) => mk_not(a),
        _ if a == b => Expr::bool(true),
        _ => build(a, b).expect("bool operands"),
    }
}

fn mk_equals(a: Expr, b: Expr) -> Expr {
    if a.ty().is_bool() {
        return mk_bool_eq(a, b, Expr::equals);
    }
    if a.is_constant() && b.is_constant() {
        return Expr::bool(a.to_value() == b.to_value());
    }
    if a == b && !has_indexed_access(&a) {
        return Expr::bool(true);
    }
    Expr::equals(a, b).expect("compatible operands")
}

fn mk_compare(kind: &ExprKind, a: Expr, b: Expr) -> Expr {
    use ExprKind::*;
    if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
        return Expr::bool(match kind {
            Le(..) => x <= y,
            Lt(..) => x < y,
            Ge(..) => x >= y,
            _ => x > y,
        });
    }
    if a == b && !has_indexed_access(&a) {
        return Expr::bool(matches!(kind, Le(..) | Ge(..)));
    }
    match kind {
        Le(..) => Expr::le(a, b),
        Lt(..) => Expr::lt(a, b),
        Ge(..) => Expr::ge(a, b),
        _ => Expr::gt(a, b),
    }
    .expect("integer operands")
}

fn mk_plus(children: Vec<Expr>) -> Expr {
    let mut terms = Vec::new();
    let mut constants = Vec::new();
    for c in children {
        match c.kind() {
            ExprKind::Plus(xs) => {
                for x in xs {
                    match x.as_int() {
                        Some(v) => constants.push(v),
                        None => terms.push(x.clone()),
                    }
                }
            }
            ExprKind::Int(v) => constants.push(*v),
            _ => terms.push(c),
        }
    }
    let folded = constants.iter().try_fold(0i64, |acc, &v| acc.checked_add(v));
    match folded {
        Some(sum) => {
            if sum != 0 || terms.is_empty() {
                terms.push(Expr::int(sum));
            }
        }
        None => terms.extend(constants.into_iter().map(Expr::int)),
    }
    if terms.len() == 1 {
        return terms.pop().unwrap();
    }
    Expr::plus(terms).expect("integer operands")
}

fn mk_minus(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
        if let Some(d) = x.checked_sub(y) {
            return Expr::int(d);
        }
    }
    if b.as_int() == Some(0) {
        return a;
    }
    if a == b && !has_indexed_access(&a) {
        return Expr::int(0);
    }
    Expr::minus(a, b).expect("integer operands")
}

fn mk_times(children: Vec<Expr>) -> Expr {
    let mut terms = Vec::new();
    let mut constants = Vec::new();
    for c in children {
        match c.kind() {
            ExprKind::Times(xs) => {
                for x in xs {
                    match x.as_int() {
                        Some(v) => constants.push(v),
                        None => terms.push(x.clone()),
                    }
                }
            }
            ExprKind::Int(v) => constants.push(*v),
            _ => terms.push(c),
        }
    }
    let folded = constants.iter().try_fold(1i64, |acc, &v| acc.checked_mul(v));
    match folded {
        Some(0) if !terms.iter().any(has_indexed_access) => return Expr::int(0),
        Some(product) => {
            if product != 1 || terms.is_empty() {
                terms.push(Expr::int(product));
            }
        }
        None => terms.extend(constants.into_iter().map(Expr::int)),
    }
    if terms.len() == 1 {
        return terms.pop().unwrap();
    }
    Expr::times(terms).expect("integer operands")
}

fn mk_count(children: Vec<Expr>) -> Expr {
    let kept: Vec<Expr> = children
        .into_iter()
        .filter(|c| c.as_bool() != Some(false))
        .collect();
    if kept.iter().all(|c| c.as_bool() == Some(true)) {
        return Expr::int(kept.len() as i64);
    }
    Expr::count(kept).expect("bool operands")
}
