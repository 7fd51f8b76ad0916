use std::fmt;
use std::sync::Arc;

use super::ModelError;

/// Static type of a fluent, parameter or expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Bool,
    /// Closed integer interval `[lower, upper]`.
    Int { lower: i64, upper: i64 },
    /// Enumerated user type, identified by name.
    User(Arc<str>),
    /// Fixed-size array; elements may themselves be arrays.
    Array { size: usize, element: Box<Type> },
}

impl Type {
    pub fn int(lower: i64, upper: i64) -> Result<Type, ModelError> {
        if lower > upper {
            return Err(ModelError::EmptyIntRange { lower, upper });
        }
        Ok(Type::Int { lower, upper })
    }

    pub fn user(name: &str) -> Type {
        Type::User(name.into())
    }

    pub fn array(size: usize, element: Type) -> Result<Type, ModelError> {
        if size < 2 {
            return Err(ModelError::ArraySize(size));
        }
        Ok(Type::Array {
            size,
            element: Box::new(element),
        })
    }

    /// Builds a nested array type with the given dimensions, outermost first.
    pub fn array_of(dims: &[usize], base: Type) -> Result<Type, ModelError> {
        dims.iter()
            .rev()
            .try_fold(base, |acc, &size| Type::array(size, acc))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::Bool)
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Type::Int { .. })
    }

    pub fn is_array(&self) -> bool {
        matches!(self, Type::Array { .. })
    }

    pub fn user_name(&self) -> Option<&str> {
        match self {
            Type::User(name) => Some(name),
            _ => None,
        }
    }

    pub fn int_bounds(&self) -> Option<(i64, i64)> {
        match self {
            Type::Int { lower, upper } => Some((*lower, *upper)),
            _ => None,
        }
    }

    /// Array dimensions from the outermost level inwards; empty for scalars.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::new();
        let mut ty = self;
        while let Type::Array { size, element } = ty {
            dims.push(*size);
            ty = element;
        }
        dims
    }

    pub fn depth(&self) -> usize {
        self.dims().len()
    }

    /// Scalar type found below every array level.
    pub fn base(&self) -> &Type {
        let mut ty = self;
        while let Type::Array { element, .. } = ty {
            ty = element;
        }
        ty
    }

    /// Type obtained after applying `n` indices, if the nesting allows it.
    pub fn indexed(&self, n: usize) -> Option<&Type> {
        let mut ty = self;
        for _ in 0..n {
            match ty {
                Type::Array { element, .. } => ty = element,
                _ => return None,
            }
        }
        Some(ty)
    }

    /// Number of scalar cells in a value of this type.
    pub fn cell_count(&self) -> usize {
        self.dims().iter().product()
    }

    /// Whether values of the two types may be compared or assigned to each other.
    /// Integer types are compatible regardless of bounds; range checks happen on values.
    pub fn compatible(&self, other: &Type) -> bool {
        match (self, other) {
            (Type::Bool, Type::Bool) => true,
            (Type::Int { .. }, Type::Int { .. }) => true,
            (Type::User(a), Type::User(b)) => a == b,
            (
                Type::Array {
                    size: s1,
                    element: e1,
                },
                Type::Array {
                    size: s2,
                    element: e2,
                },
            ) => s1 == s2 && e1.compatible(e2),
            _ => false,
        }
    }

    /// Least type covering both; only defined for compatible types.
    pub(crate) fn hull(&self, other: &Type) -> Option<Type> {
        match (self, other) {
            (
                Type::Int {
                    lower: l1,
                    upper: u1,
                },
                Type::Int {
                    lower: l2,
                    upper: u2,
                },
            ) => Some(Type::Int {
                lower: *l1.min(l2),
                upper: *u1.max(u2),
            }),
            (
                Type::Array {
                    size: s1,
                    element: e1,
                },
                Type::Array {
                    size: s2,
                    element: e2,
                },
            ) if s1 == s2 => Some(Type::Array {
                size: *s1,
                element: Box::new(e1.hull(e2)?),
            }),
            (a, b) if a == b => Some(a.clone()),
            _ => None,
        }
    }

    /// Checks structural invariants: bounds ordered, array sizes above one.
    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        match self {
            Type::Int { lower, upper } if lower > upper => Err(ModelError::EmptyIntRange {
                lower: *lower,
                upper: *upper,
            }),
            Type::Array { size, element } => {
                if *size < 2 {
                    return Err(ModelError::ArraySize(*size));
                }
                element.validate()
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => write!(f, "bool"),
            Type::Int { lower, upper } => write!(f, "integer[{lower}, {upper}]"),
            Type::User(name) => write!(f, "{name}"),
            Type::Array { size, element } => write!(f, "array[{size}, {element}]"),
        }
    }
}

/// Constant value of any type. Arrays are nested row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Object(Arc<str>),
    Array(Vec<Value>),
}

impl Value {
    pub fn object(name: &str) -> Value {
        Value::Object(name.into())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&str> {
        match self {
            Value::Object(o) => Some(o),
            _ => None,
        }
    }

    /// Builds an array value of the given shape filled with `fill`.
    pub fn filled(dims: &[usize], fill: &Value) -> Value {
        match dims.split_first() {
            None => fill.clone(),
            Some((&n, rest)) => Value::Array((0..n).map(|_| Value::filled(rest, fill)).collect()),
        }
    }

    /// Follows a path of indices; `None` when any index is out of range or the value is scalar.
    pub fn at(&self, path: &[usize]) -> Option<&Value> {
        path.iter().try_fold(self, |v, &i| match v {
            Value::Array(items) => items.get(i),
            _ => None,
        })
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Value> {
        let mut v = self;
        for &i in path {
            v = match v {
                Value::Array(items) => items.get_mut(i)?,
                _ => return None,
            };
        }
        Some(v)
    }

    /// Every scalar cell with its index path, row-major.
    pub fn cells(&self) -> Vec<(Vec<usize>, &Value)> {
        let mut out = Vec::new();
        fn walk<'a>(v: &'a Value, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Value)>) {
            match v {
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        path.push(i);
                        walk(item, path, out);
                        path.pop();
                    }
                }
                scalar => out.push((path.clone(), scalar)),
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Object(s.into())
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(items: Vec<T>) -> Self {
        Value::Array(items.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Object(o) => write!(f, "{o}"),
            Value::Array(items) => {
                write!(f, "[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "]")
            }
        }
    }
}
