use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{ModelError, Type, Value};

/// A (possibly partial) access to a fluent: `name(args…)[i]…[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentAccess {
    pub name: Arc<str>,
    /// Declared value type of the fluent, before indexing.
    pub value_type: Type,
    pub args: Vec<Expr>,
    pub indices: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Object(Arc<str>),
    Param(Arc<str>),
    Fluent(FluentAccess),
    Array(Vec<Expr>),
    Not(Expr),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Expr, Expr),
    Iff(Expr, Expr),
    Equals(Expr, Expr),
    Le(Expr, Expr),
    Lt(Expr, Expr),
    Ge(Expr, Expr),
    Gt(Expr, Expr),
    Plus(Vec<Expr>),
    Minus(Expr, Expr),
    Times(Vec<Expr>),
    Count(Vec<Expr>),
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    kind: ExprKind,
    ty: Type,
}

/// Immutable, typed expression tree.
///
/// Equality, ordering and hashing are structural, so two expressions built
/// from the same declaration are interchangeable wherever identity matters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

fn mismatch(msg: impl Into<String>) -> ModelError {
    ModelError::TypeMismatch(msg.into())
}

fn require_bool(op: &str, e: &Expr) -> Result<(), ModelError> {
    if e.ty().is_bool() {
        Ok(())
    } else {
        Err(mismatch(format!(
            "{op} expects a bool operand, got `{e}` of type {}",
            e.ty()
        )))
    }
}

fn require_int(op: &str, e: &Expr) -> Result<(i64, i64), ModelError> {
    e.ty().int_bounds().ok_or_else(|| {
        mismatch(format!(
            "{op} expects an integer operand, got `{e}` of type {}",
            e.ty()
        ))
    })
}

fn bool_array_or_bool(t: &Type) -> bool {
    t.base().is_bool()
}

fn infer(kind: &ExprKind) -> Result<Type, ModelError> {
    use ExprKind::*;
    Ok(match kind {
        Bool(_) => Type::Bool,
        Int(v) => Type::Int {
            lower: *v,
            upper: *v,
        },
        Object(_) | Param(_) => {
            return Err(mismatch("objects and parameters carry an explicit type"));
        }
        Fluent(access) => {
            for arg in &access.args {
                if !matches!(arg.kind(), Object(_) | Param(_)) || arg.ty().user_name().is_none() {
                    return Err(mismatch(format!(
                        "argument `{arg}` of fluent `{}` must be an object or a user-typed parameter",
                        access.name
                    )));
                }
            }
            for idx in &access.indices {
                require_int("array index", idx)?;
            }
            match access.value_type.indexed(access.indices.len()) {
                Some(t) => t.clone(),
                None => {
                    return Err(mismatch(format!(
                        "fluent `{}` of type {} accepts at most {} indices, got {}",
                        access.name,
                        access.value_type,
                        access.value_type.depth(),
                        access.indices.len()
                    )))
                }
            }
        }
        Array(items) => {
            let first = items
                .first()
                .ok_or_else(|| mismatch("array literal must have at least one element"))?;
            let mut element = first.ty().clone();
            for item in &items[1..] {
                element = element.hull(item.ty()).ok_or_else(|| {
                    mismatch(format!(
                        "array literal mixes element types {} and {}",
                        element,
                        item.ty()
                    ))
                })?;
            }
            Type::Array {
                size: items.len(),
                element: Box::new(element),
            }
        }
        Not(x) => {
            require_bool("Not", x)?;
            Type::Bool
        }
        And(xs) | Or(xs) => {
            for x in xs {
                require_bool(if matches!(kind, And(_)) { "And" } else { "Or" }, x)?;
            }
            Type::Bool
        }
        Implies(a, b) => {
            require_bool("Implies", a)?;
            require_bool("Implies", b)?;
            Type::Bool
        }
        Iff(a, b) => {
            if !(bool_array_or_bool(a.ty()) && a.ty().compatible(b.ty())) {
                return Err(mismatch(format!(
                    "Iff expects bool operands of one shape, got {} and {}",
                    a.ty(),
                    b.ty()
                )));
            }
            Type::Bool
        }
        Equals(a, b) => {
            if !a.ty().compatible(b.ty()) {
                return Err(mismatch(format!(
                    "cannot compare `{a}` of type {} with `{b}` of type {}",
                    a.ty(),
                    b.ty()
                )));
            }
            Type::Bool
        }
        Le(a, b) | Lt(a, b) | Ge(a, b) | Gt(a, b) => {
            require_int("comparison", a)?;
            require_int("comparison", b)?;
            Type::Bool
        }
        Plus(xs) | Times(xs) => {
            let is_plus = matches!(kind, Plus(_));
            let op = if is_plus { "Plus" } else { "Times" };
            if xs.is_empty() {
                return Err(mismatch(format!("{op} needs at least one operand")));
            }
            let mut acc = require_int(op, &xs[0])?;
            for x in &xs[1..] {
                let b = require_int(op, x)?;
                acc = if is_plus {
                    (acc.0.saturating_add(b.0), acc.1.saturating_add(b.1))
                } else {
                    let products = [
                        acc.0.saturating_mul(b.0),
                        acc.0.saturating_mul(b.1),
                        acc.1.saturating_mul(b.0),
                        acc.1.saturating_mul(b.1),
                    ];
                    (
                        *products.iter().min().unwrap(),
                        *products.iter().max().unwrap(),
                    )
                };
            }
            Type::Int {
                lower: acc.0,
                upper: acc.1,
            }
        }
        Minus(a, b) => {
            let (al, au) = require_int("Minus", a)?;
            let (bl, bu) = require_int("Minus", b)?;
            Type::Int {
                lower: al.saturating_sub(bu),
                upper: au.saturating_sub(bl),
            }
        }
        Count(xs) => {
            if xs.is_empty() {
                return Err(mismatch("Count needs at least one argument"));
            }
            for x in xs {
                require_bool("Count", x)?;
            }
            Type::Int {
                lower: 0,
                upper: xs.len() as i64,
            }
        }
    })
}

impl Expr {
    /// Builds a node, inferring and checking its type.
    pub fn new(kind: ExprKind) -> Result<Expr, ModelError> {
        let ty = infer(&kind)?;
        Ok(Expr(Arc::new(Node { kind, ty })))
    }

    fn raw(kind: ExprKind, ty: Type) -> Expr {
        Expr(Arc::new(Node { kind, ty }))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::raw(ExprKind::Bool(b), Type::Bool)
    }

    pub fn int(v: i64) -> Expr {
        Expr::raw(
            ExprKind::Int(v),
            Type::Int {
                lower: v,
                upper: v,
            },
        )
    }

    /// Object constant of user type `ty`.
    pub fn object(name: &str, ty: &Type) -> Result<Expr, ModelError> {
        if ty.user_name().is_none() {
            return Err(mismatch(format!(
                "object `{name}` must have a user type, got {ty}"
            )));
        }
        Ok(Expr::raw(ExprKind::Object(name.into()), ty.clone()))
    }

    /// Reference to an action parameter; only user types and bounded integers are allowed.
    pub fn param(name: &str, ty: &Type) -> Result<Expr, ModelError> {
        if !(ty.is_int() || ty.user_name().is_some()) {
            return Err(mismatch(format!(
                "parameter `{name}` must be a user type or bounded integer, got {ty}"
            )));
        }
        ty.validate()?;
        Ok(Expr::raw(ExprKind::Param(name.into()), ty.clone()))
    }

    pub fn array(items: Vec<Expr>) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Array(items))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(x: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Not(x))
    }

    pub fn and(xs: Vec<Expr>) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::And(xs))
    }

    pub fn or(xs: Vec<Expr>) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Or(xs))
    }

    pub fn implies(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Implies(a, b))
    }

    pub fn iff(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Iff(a, b))
    }

    pub fn equals(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Equals(a, b))
    }

    pub fn le(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Le(a, b))
    }

    pub fn lt(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Lt(a, b))
    }

    pub fn ge(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Ge(a, b))
    }

    pub fn gt(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Gt(a, b))
    }

    pub fn plus(xs: Vec<Expr>) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Plus(xs))
    }

    pub fn minus(a: Expr, b: Expr) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Minus(a, b))
    }

    pub fn times(xs: Vec<Expr>) -> Result<Expr, ModelError> {
        Expr::new(ExprKind::Times(xs))
    }

    /// Count of true arguments. Accepts either several Boolean expressions or a
    /// single array literal of them, which is flattened one level.
    pub fn count(args: Vec<Expr>) -> Result<Expr, ModelError> {
        let args = match args.as_slice() {
            [single] => match single.kind() {
                ExprKind::Array(items) => items.clone(),
                _ => args,
            },
            _ => args,
        };
        Expr::new(ExprKind::Count(args))
    }

    /// Constant expression for `value`, typed by `ty`.
    pub fn constant(value: &Value, ty: &Type) -> Result<Expr, ModelError> {
        match (value, ty) {
            (Value::Bool(b), Type::Bool) => Ok(Expr::bool(*b)),
            (Value::Int(i), Type::Int { .. }) => Ok(Expr::int(*i)),
            (Value::Object(o), Type::User(_)) => Expr::object(o, ty),
            (Value::Array(items), Type::Array { size, element }) if items.len() == *size => {
                let items = items
                    .iter()
                    .map(|v| Expr::constant(v, element))
                    .collect::<Result<Vec<_>, _>>()?;
                Expr::array(items)
            }
            _ => Err(mismatch(format!("value {value} does not have type {ty}"))),
        }
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.kind() {
            ExprKind::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.kind() {
            ExprKind::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_fluent(&self) -> Option<&FluentAccess> {
        match self.kind() {
            ExprKind::Fluent(access) => Some(access),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self.kind() {
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Object(_) => true,
            ExprKind::Array(items) => items.iter().all(Expr::is_constant),
            _ => false,
        }
    }

    /// Value of a constant expression (including nested array literals of constants).
    pub fn to_value(&self) -> Option<Value> {
        match self.kind() {
            ExprKind::Bool(b) => Some(Value::Bool(*b)),
            ExprKind::Int(i) => Some(Value::Int(*i)),
            ExprKind::Object(o) => Some(Value::Object(o.clone())),
            ExprKind::Array(items) => items
                .iter()
                .map(Expr::to_value)
                .collect::<Option<Vec<_>>>()
                .map(Value::Array),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match self.kind() {
            Bool(_) | Int(_) | Object(_) | Param(_) => Vec::new(),
            Fluent(a) => a.args.iter().chain(a.indices.iter()).collect(),
            Array(xs) | And(xs) | Or(xs) | Plus(xs) | Times(xs) | Count(xs) => xs.iter().collect(),
            Not(x) => vec![x],
            Implies(a, b) | Iff(a, b) | Equals(a, b) | Le(a, b) | Lt(a, b) | Ge(a, b)
            | Gt(a, b) | Minus(a, b) => vec![a, b],
        }
    }

    /// Rebuilds this node with new children (same arity, same order as [`Expr::children`]).
    pub fn with_children(&self, children: Vec<Expr>) -> Result<Expr, ModelError> {
        use ExprKind::*;
        let mut it = children.into_iter();
        let mut next = || it.next().expect("child count mismatch");
        let kind = match self.kind() {
            Bool(_) | Int(_) | Object(_) | Param(_) => return Ok(self.clone()),
            Fluent(a) => {
                let args = (0..a.args.len()).map(|_| next()).collect();
                let indices = (0..a.indices.len()).map(|_| next()).collect();
                Fluent(FluentAccess {
                    name: a.name.clone(),
                    value_type: a.value_type.clone(),
                    args,
                    indices,
                })
            }
            Array(xs) => Array(xs.iter().map(|_| next()).collect()),
            And(xs) => And(xs.iter().map(|_| next()).collect()),
            Or(xs) => Or(xs.iter().map(|_| next()).collect()),
            Plus(xs) => Plus(xs.iter().map(|_| next()).collect()),
            Times(xs) => Times(xs.iter().map(|_| next()).collect()),
            Count(xs) => Count(xs.iter().map(|_| next()).collect()),
            Not(_) => Not(next()),
            Implies(..) => Implies(next(), next()),
            Iff(..) => Iff(next(), next()),
            Equals(..) => Equals(next(), next()),
            Le(..) => Le(next(), next()),
            Lt(..) => Lt(next(), next()),
            Ge(..) => Ge(next(), next()),
            Gt(..) => Gt(next(), next()),
            Minus(..) => Minus(next(), next()),
        };
        Expr::new(kind)
    }

    /// Applies `f` to every child and rebuilds the node.
    pub fn try_map_children<E, F>(&self, mut f: F) -> Result<Expr, E>
    where
        E: From<ModelError>,
        F: FnMut(&Expr) -> Result<Expr, E>,
    {
        let children = self.children();
        if children.is_empty() {
            return Ok(self.clone());
        }
        let mapped = children
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>, E>>()?;
        Ok(self.with_children(mapped)?)
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::node_count)
            .sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    /// Names of free parameters.
    pub fn params(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ExprKind::Param(p) = e.kind() {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        !self.any(&|e| matches!(e.kind(), ExprKind::Param(_)))
    }

    pub fn has_count(&self) -> bool {
        self.any(&|e| matches!(e.kind(), ExprKind::Count(_)))
    }

    /// Whether any fluent access with array indices (or of array type) occurs.
    pub fn has_array_access(&self) -> bool {
        self.any(&|e| match e.kind() {
            ExprKind::Fluent(a) => !a.indices.is_empty() || a.value_type.is_array(),
            ExprKind::Array(_) => true,
            _ => false,
        })
    }

    /// All fluent-access sub-expressions, pre-order.
    pub fn fluent_accesses(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if matches!(e.kind(), ExprKind::Fluent(_)) {
                out.push(e);
            }
        });
        out
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, xs: &[&Expr]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExprKind::*;
        let children = self.children();
        match self.kind() {
            Bool(b) => write!(f, "{b}"),
            Int(i) => write!(f, "{i}"),
            Object(name) | Param(name) => write!(f, "{name}"),
            Fluent(a) => {
                write!(f, "{}", a.name)?;
                if !a.args.is_empty() {
                    let args: Vec<&Expr> = a.args.iter().collect();
                    write_list(f, "", &args)?;
                }
                for idx in &a.indices {
                    write!(f, "[{idx}]")?;
                }
                Ok(())
            }
            Array(items) => {
                write!(f, "[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Not(_) => write_list(f, "Not", &children),
            And(_) => write_list(f, "And", &children),
            Or(_) => write_list(f, "Or", &children),
            Implies(..) => write_list(f, "Implies", &children),
            Iff(..) => write_list(f, "Iff", &children),
            Equals(..) => write_list(f, "Equals", &children),
            Le(..) => write_list(f, "LE", &children),
            Lt(..) => write_list(f, "LT", &children),
            Ge(..) => write_list(f, "GE", &children),
            Gt(..) => write_list(f, "GT", &children),
            Plus(_) => write_list(f, "Plus", &children),
            Minus(..) => write_list(f, "Minus", &children),
            Times(_) => write_list(f, "Times", &children),
            Count(_) => write_list(f, "Count", &children),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bool_fluent(name: &str) -> Expr {
        Expr::new(ExprKind::Fluent(FluentAccess {
            name: name.into(),
            value_type: Type::Bool,
            args: vec![],
            indices: vec![],
        }))
        .unwrap()
    }

    #[test]
    fn count_accepts_both_call_forms() {
        let (a, b, c) = (bool_fluent("a"), bool_fluent("b"), bool_fluent("c"));
        let spread = Expr::count(vec![a.clone(), b.clone(), c.clone()]).unwrap();
        let listed =
            Expr::count(vec![Expr::array(vec![a.clone(), b.clone(), c.clone()]).unwrap()])
                .unwrap();
        assert_eq!(spread, listed);
        assert_eq!(spread.children().len(), 3);
        assert_eq!(spread.ty(), &Type::Int { lower: 0, upper: 3 });

        let single = Expr::count(vec![Expr::array(vec![a.clone()]).unwrap()]).unwrap();
        assert_eq!(single.children().len(), 1);
    }

    #[test]
    fn count_rejects_non_bool_and_empty() {
        let a = bool_fluent("a");
        assert!(Expr::count(vec![a, Expr::int(5)]).is_err());
        assert!(Expr::count(vec![]).is_err());
    }

    #[test]
    fn partial_access_is_array_typed() {
        let grid = Type::array_of(&[3, 3], Type::Bool).unwrap();
        let row = Expr::new(ExprKind::Fluent(FluentAccess {
            name: "at_robot".into(),
            value_type: grid.clone(),
            args: vec![],
            indices: vec![Expr::int(0)],
        }))
        .unwrap();
        assert_eq!(row.ty().dims(), vec![3]);
        let literal = Expr::array(vec![Expr::bool(false); 3]).unwrap();
        assert!(Expr::iff(row.clone(), literal).is_ok());
        let too_deep = Expr::new(ExprKind::Fluent(FluentAccess {
            name: "at_robot".into(),
            value_type: grid,
            args: vec![],
            indices: vec![Expr::int(0); 3],
        }));
        assert!(too_deep.is_err());
    }

    #[test]
    fn equals_across_user_types_is_rejected() {
        let a = Expr::object("A", &Type::user("Vehicle")).unwrap();
        let r = Expr::object("R", &Type::user("Colour")).unwrap();
        assert!(Expr::equals(a.clone(), r).is_err());
        assert!(Expr::equals(a.clone(), a).is_ok());
    }

    #[test]
    fn display_uses_functional_notation() {
        let e = Expr::or(vec![
            Expr::equals(
                Expr::plus(vec![Expr::int(1), Expr::int(2)]).unwrap(),
                Expr::int(3),
            )
            .unwrap(),
            bool_fluent("b"),
        ])
        .unwrap();
        assert_eq!(e.to_string(), "Or(Equals(Plus(1, 2), 3), b)");
        assert_eq!(e.node_count(), 7);
    }

    #[test]
    fn structural_identity() {
        let build = || Expr::and(vec![bool_fluent("a"), bool_fluent("b")]).unwrap();
        assert_eq!(build(), build());
        let mut set = std::collections::HashSet::new();
        set.insert(build());
        assert!(set.contains(&build()));
    }
}
