use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{Expr, ExprKind, FluentAccess, GroundFluent, ModelError, State, Type, Value};

/// Enumerated user type and its objects, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserType {
    pub name: Arc<str>,
    pub objects: Vec<Arc<str>>,
}

/// Named, typed parameter of a fluent signature or an action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Param {
    pub name: Arc<str>,
    pub ty: Type,
}

impl Param {
    pub fn new(name: &str, ty: Type) -> Param {
        Param {
            name: name.into(),
            ty,
        }
    }

    pub fn expr(&self) -> Expr {
        Expr::param(&self.name, &self.ty).expect("parameter types are validated on declaration")
    }
}

/// State variable declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fluent {
    pub name: Arc<str>,
    /// User-typed signature parameters.
    pub params: Vec<Param>,
    pub value_type: Type,
    pub default: Option<Value>,
}

impl Fluent {
    pub fn new(name: &str, params: Vec<Param>, value_type: Type) -> Fluent {
        Fluent {
            name: name.into(),
            params,
            value_type,
            default: None,
        }
    }

    pub fn with_default(mut self, default: impl Into<Value>) -> Fluent {
        self.default = Some(default.into());
        self
    }

    /// Typed access `name(args)[indices]`.
    pub fn access(&self, args: Vec<Expr>, indices: Vec<Expr>) -> Result<Expr, ModelError> {
        if args.len() != self.params.len() {
            return Err(ModelError::TypeMismatch(format!(
                "fluent `{}` takes {} arguments, got {}",
                self.name,
                self.params.len(),
                args.len()
            )));
        }
        for (arg, param) in args.iter().zip(&self.params) {
            if arg.ty() != &param.ty {
                return Err(ModelError::TypeMismatch(format!(
                    "argument `{arg}` of `{}` has type {}, expected {}",
                    self.name,
                    arg.ty(),
                    param.ty
                )));
            }
        }
        Expr::new(ExprKind::Fluent(FluentAccess {
            name: self.name.clone(),
            value_type: self.value_type.clone(),
            args,
            indices,
        }))
    }

    /// Access to a fluent without signature parameters.
    pub fn get(&self) -> Result<Expr, ModelError> {
        self.access(Vec::new(), Vec::new())
    }

    /// Access with signature arguments and no indices.
    pub fn atom(&self, args: Vec<Expr>) -> Result<Expr, ModelError> {
        self.access(args, Vec::new())
    }

    /// Indexed access to a parameterless array fluent.
    pub fn cell(&self, indices: Vec<Expr>) -> Result<Expr, ModelError> {
        self.access(Vec::new(), indices)
    }

    /// Indexed access with constant indices.
    pub fn at(&self, indices: &[i64]) -> Result<Expr, ModelError> {
        self.cell(indices.iter().map(|&i| Expr::int(i)).collect())
    }
}

/// Assignment `target := value`, optionally guarded by `condition`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Effect {
    pub target: Expr,
    pub value: Expr,
    pub condition: Option<Expr>,
}

impl Effect {
    pub fn new(target: Expr, value: Expr) -> Result<Effect, ModelError> {
        Effect::build(target, value, None)
    }

    pub fn conditional(condition: Expr, target: Expr, value: Expr) -> Result<Effect, ModelError> {
        Effect::build(target, value, Some(condition))
    }

    fn build(target: Expr, value: Expr, condition: Option<Expr>) -> Result<Effect, ModelError> {
        if target.as_fluent().is_none() {
            return Err(ModelError::TypeMismatch(format!(
                "effect target `{target}` is not a fluent"
            )));
        }
        if !target.ty().compatible(value.ty()) {
            return Err(ModelError::TypeMismatch(format!(
                "cannot assign `{value}` of type {} to `{target}` of type {}",
                value.ty(),
                target.ty()
            )));
        }
        if let Some(c) = &condition {
            if !c.ty().is_bool() {
                return Err(ModelError::TypeMismatch(format!(
                    "effect condition `{c}` is not bool"
                )));
            }
        }
        Ok(Effect {
            target,
            value,
            condition,
        })
    }

    pub fn is_conditional(&self) -> bool {
        self.condition.is_some()
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.condition {
            write!(f, "if {c}: ")?;
        }
        write!(f, "{} := {}", self.target, self.value)
    }
}

/// Instantaneous action schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: Arc<str>,
    pub params: Vec<Param>,
    pub preconditions: Vec<Expr>,
    pub effects: Vec<Effect>,
}

impl Action {
    pub fn builder(name: &str) -> ActionBuilder {
        ActionBuilder {
            action: Action {
                name: name.into(),
                params: Vec::new(),
                preconditions: Vec::new(),
                effects: Vec::new(),
            },
        }
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| &*p.name == name)
    }

    pub fn has_int_params(&self) -> bool {
        self.params.iter().any(|p| p.ty.is_int())
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "action {}", self.name)?;
        if !self.params.is_empty() {
            write!(f, "(")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{} {}", p.ty, p.name)?;
            }
            write!(f, ")")?;
        }
        writeln!(f, " {{")?;
        writeln!(f, "  preconditions = [")?;
        for p in &self.preconditions {
            writeln!(f, "    {p}")?;
        }
        writeln!(f, "  ]")?;
        writeln!(f, "  effects = [")?;
        for e in &self.effects {
            writeln!(f, "    {e}")?;
        }
        writeln!(f, "  ]")?;
        write!(f, "}}")
    }
}

pub struct ActionBuilder {
    action: Action,
}

impl ActionBuilder {
    /// Declares a parameter and returns a reference expression to it.
    pub fn param(&mut self, name: &str, ty: Type) -> Result<Expr, ModelError> {
        if self.action.param(name).is_some() {
            return Err(ModelError::Duplicate {
                kind: "parameter",
                name: name.to_string(),
            });
        }
        let expr = Expr::param(name, &ty)?;
        self.action.params.push(Param::new(name, ty));
        Ok(expr)
    }

    pub fn int_param(&mut self, name: &str, lower: i64, upper: i64) -> Result<Expr, ModelError> {
        self.param(name, Type::int(lower, upper)?)
    }

    pub fn precondition(&mut self, condition: Expr) -> Result<(), ModelError> {
        if !condition.ty().is_bool() {
            return Err(ModelError::TypeMismatch(format!(
                "precondition `{condition}` is not bool"
            )));
        }
        self.action.preconditions.push(condition);
        Ok(())
    }

    pub fn effect(&mut self, target: Expr, value: Expr) -> Result<(), ModelError> {
        self.action.effects.push(Effect::new(target, value)?);
        Ok(())
    }

    pub fn conditional_effect(
        &mut self,
        condition: Expr,
        target: Expr,
        value: Expr,
    ) -> Result<(), ModelError> {
        self.action
            .effects
            .push(Effect::conditional(condition, target, value)?);
        Ok(())
    }

    pub fn build(self) -> Result<Action, ModelError> {
        let declared: BTreeMap<&str, &Type> = self
            .action
            .params
            .iter()
            .map(|p| (&*p.name, &p.ty))
            .collect();
        let mut exprs: Vec<&Expr> = self.action.preconditions.iter().collect();
        for e in &self.action.effects {
            exprs.push(&e.target);
            exprs.push(&e.value);
            exprs.extend(e.condition.iter());
        }
        for e in exprs {
            check_params(e, &self.action.name, &declared)?;
        }
        Ok(self.action)
    }
}

fn check_params(
    e: &Expr,
    action: &str,
    declared: &BTreeMap<&str, &Type>,
) -> Result<(), ModelError> {
    let mut result = Ok(());
    e.walk(&mut |node| {
        if let ExprKind::Param(name) = node.kind() {
            if result.is_err() {
                return;
            }
            match declared.get(&**name) {
                None => {
                    result = Err(ModelError::UnboundParameter {
                        action: action.to_string(),
                        param: name.to_string(),
                    })
                }
                Some(ty) if *ty != node.ty() => {
                    result = Err(ModelError::TypeMismatch(format!(
                        "parameter `{name}` of `{action}` used with type {}, declared {}",
                        node.ty(),
                        ty
                    )))
                }
                _ => {}
            }
        }
    });
    result
}

/// Explicit initial assignment to a (possibly partial) fluent cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialValue {
    pub fluent: Arc<str>,
    pub args: Vec<Arc<str>>,
    pub indices: Vec<usize>,
    pub value: Value,
}

impl InitialValue {
    /// Converts a constant fluent access into an initial-value key.
    pub fn from_target(target: &Expr, value: Value) -> Result<InitialValue, ModelError> {
        let access = target.as_fluent().ok_or_else(|| {
            ModelError::TypeMismatch(format!("initial value target `{target}` is not a fluent"))
        })?;
        let args = access
            .args
            .iter()
            .map(|a| match a.kind() {
                ExprKind::Object(o) => Ok(o.clone()),
                _ => Err(ModelError::TypeMismatch(format!(
                    "initial value target `{target}` must use object arguments"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let indices = access
            .indices
            .iter()
            .map(|i| match i.as_int() {
                Some(v) if v >= 0 => Ok(v as usize),
                _ => Err(ModelError::TypeMismatch(format!(
                    "initial value target `{target}` must use constant non-negative indices"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InitialValue {
            fluent: access.name.clone(),
            args,
            indices,
            value,
        })
    }
}

impl fmt::Display for InitialValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fluent)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        for i in &self.indices {
            write!(f, "[{i}]")?;
        }
        write!(f, " := {}", self.value)
    }
}

/// Raw problem components; [`Problem::from_parts`] validates them.
#[derive(Clone, Debug, Default)]
pub struct ProblemParts {
    pub name: String,
    pub types: Vec<UserType>,
    pub fluents: Vec<Fluent>,
    pub actions: Vec<Action>,
    pub init: Vec<InitialValue>,
    pub goals: Vec<Expr>,
}

/// A fully type-checked planning problem: fluents, actions, initial values and goals.
#[derive(Clone, Debug)]
pub struct Problem {
    parts: ProblemParts,
    object_types: BTreeMap<Arc<str>, Type>,
    fluent_index: BTreeMap<Arc<str>, usize>,
}

impl Problem {
    pub fn builder(name: &str) -> ProblemBuilder {
        ProblemBuilder {
            parts: ProblemParts {
                name: name.to_string(),
                ..ProblemParts::default()
            },
        }
    }

    pub fn from_parts(parts: ProblemParts) -> Result<Problem, ModelError> {
        let mut object_types = BTreeMap::new();
        let mut type_names = BTreeSet::new();
        for t in &parts.types {
            if !type_names.insert(t.name.clone()) {
                return Err(ModelError::Duplicate {
                    kind: "type",
                    name: t.name.to_string(),
                });
            }
            for o in &t.objects {
                if object_types
                    .insert(o.clone(), Type::User(t.name.clone()))
                    .is_some()
                {
                    return Err(ModelError::Duplicate {
                        kind: "object",
                        name: o.to_string(),
                    });
                }
            }
        }
        let mut fluent_index = BTreeMap::new();
        for (i, f) in parts.fluents.iter().enumerate() {
            if fluent_index.insert(f.name.clone(), i).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "fluent",
                    name: f.name.to_string(),
                });
            }
        }
        let problem = Problem {
            parts,
            object_types,
            fluent_index,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn into_parts(self) -> ProblemParts {
        self.parts
    }

    pub fn parts(&self) -> &ProblemParts {
        &self.parts
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn types(&self) -> &[UserType] {
        &self.parts.types
    }

    pub fn fluents(&self) -> &[Fluent] {
        &self.parts.fluents
    }

    pub fn actions(&self) -> &[Action] {
        &self.parts.actions
    }

    pub fn init(&self) -> &[InitialValue] {
        &self.parts.init
    }

    pub fn goals(&self) -> &[Expr] {
        &self.parts.goals
    }

    pub fn fluent(&self, name: &str) -> Option<&Fluent> {
        self.fluent_index.get(name).map(|&i| &self.parts.fluents[i])
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.parts.actions.iter().find(|a| &*a.name == name)
    }

    pub fn user_type(&self, name: &str) -> Option<&UserType> {
        self.parts.types.iter().find(|t| &*t.name == name)
    }

    /// Objects of a user type; empty for unknown types.
    pub fn objects_of(&self, ty: &Type) -> &[Arc<str>] {
        ty.user_name()
            .and_then(|n| self.user_type(n))
            .map(|t| t.objects.as_slice())
            .unwrap_or(&[])
    }

    pub fn object_type(&self, name: &str) -> Option<&Type> {
        self.object_types.get(name)
    }

    /// Object constant expression by name.
    pub fn object(&self, name: &str) -> Result<Expr, ModelError> {
        let ty = self.object_type(name).ok_or_else(|| ModelError::Unknown {
            kind: "object",
            name: name.to_string(),
        })?;
        Expr::object(name, ty)
    }

    /// Whether `value` is a legal value of `ty` in this problem.
    pub fn conforms(&self, value: &Value, ty: &Type) -> bool {
        match (value, ty) {
            (Value::Bool(_), Type::Bool) => true,
            (Value::Int(v), Type::Int { lower, upper }) => lower <= v && v <= upper,
            (Value::Object(o), Type::User(_)) => self.object_type(o) == Some(ty),
            (Value::Array(items), Type::Array { size, element }) => {
                items.len() == *size && items.iter().all(|v| self.conforms(v, element))
            }
            _ => false,
        }
    }

    /// Every ground instance of every fluent (Cartesian product over its signature).
    pub fn ground_fluents(&self) -> Result<Vec<GroundFluent>, ModelError> {
        let mut out = Vec::new();
        for f in self.fluents() {
            for args in self.signature_groundings(&f.params)? {
                out.push(GroundFluent::new(&f.name, args));
            }
        }
        Ok(out)
    }

    /// Cartesian product of the objects of each user-typed parameter, row-major.
    pub fn signature_groundings(&self, params: &[Param]) -> Result<Vec<Vec<Arc<str>>>, ModelError> {
        let mut combos: Vec<Vec<Arc<str>>> = vec![Vec::new()];
        for p in params {
            let objects = self.objects_of(&p.ty);
            if objects.is_empty() {
                return Err(ModelError::EmptyType(p.ty.to_string()));
            }
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    objects.iter().map(move |o| {
                        let mut next = prefix.clone();
                        next.push(o.clone());
                        next
                    })
                })
                .collect();
        }
        Ok(combos)
    }

    /// Initial state: defaults, then explicit initial values in order. Bool
    /// cells without a default start false.
    pub fn initial_state(&self) -> Result<State, ModelError> {
        // Empty arrays never occur in legal values, so one marks unset cells.
        let unset = Value::Array(Vec::new());
        let mut values = BTreeMap::new();
        for f in self.fluents() {
            let start = match (&f.default, f.value_type.base()) {
                (Some(d), _) => d.clone(),
                (None, Type::Bool) => Value::filled(&f.value_type.dims(), &Value::Bool(false)),
                (None, _) => Value::filled(&f.value_type.dims(), &unset),
            };
            for args in self.signature_groundings(&f.params)? {
                values.insert(GroundFluent::new(&f.name, args), start.clone());
            }
        }
        for iv in self.init() {
            let key = GroundFluent {
                name: iv.fluent.clone(),
                args: iv.args.clone(),
            };
            let slot = values
                .get_mut(&key)
                .and_then(|v| v.at_mut(&iv.indices))
                .ok_or_else(|| ModelError::Invalid(format!("initial value {iv} is out of range")))?;
            *slot = iv.value.clone();
        }
        for (key, v) in &values {
            if let Some((path, _)) = v.cells().into_iter().find(|(_, c)| **c == unset) {
                let cell: String = path.iter().map(|i| format!("[{i}]")).collect();
                return Err(ModelError::MissingInitialValue(format!("{key}{cell}")));
            }
        }
        Ok(State::from_map(values))
    }

    fn validate(&self) -> Result<(), ModelError> {
        for f in self.fluents() {
            let mut seen = BTreeSet::new();
            for p in &f.params {
                if !seen.insert(&p.name) {
                    return Err(ModelError::Duplicate {
                        kind: "fluent parameter",
                        name: p.name.to_string(),
                    });
                }
                if p.ty.user_name().is_none() {
                    return Err(ModelError::TypeMismatch(format!(
                        "signature parameter `{}` of fluent `{}` must have a user type",
                        p.name, f.name
                    )));
                }
                self.check_type(&p.ty)?;
            }
            self.check_type(&f.value_type)?;
            if let Some(d) = &f.default {
                if !self.conforms(d, &f.value_type) {
                    return Err(ModelError::TypeMismatch(format!(
                        "default {d} of fluent `{}` does not have type {}",
                        f.name, f.value_type
                    )));
                }
            }
        }
        for iv in self.init() {
            let f = self.fluent(&iv.fluent).ok_or_else(|| ModelError::Unknown {
                kind: "fluent",
                name: iv.fluent.to_string(),
            })?;
            if iv.args.len() != f.params.len()
                || iv
                    .args
                    .iter()
                    .zip(&f.params)
                    .any(|(a, p)| self.object_type(a) != Some(&p.ty))
            {
                return Err(ModelError::TypeMismatch(format!(
                    "initial value {iv} has arguments that do not match the signature of `{}`",
                    f.name
                )));
            }
            let dims = f.value_type.dims();
            if iv.indices.len() > dims.len()
                || iv.indices.iter().zip(&dims).any(|(i, d)| i >= d)
            {
                return Err(ModelError::Invalid(format!(
                    "initial value {iv} indexes outside {}",
                    f.value_type
                )));
            }
            let cell_ty = f.value_type.indexed(iv.indices.len()).expect("checked depth");
            if !self.conforms(&iv.value, cell_ty) {
                return Err(ModelError::TypeMismatch(format!(
                    "initial value {iv} does not have type {cell_ty}"
                )));
            }
        }
        self.check_coverage()?;

        let mut action_names = BTreeSet::new();
        for a in self.actions() {
            if !action_names.insert(&a.name) {
                return Err(ModelError::Duplicate {
                    kind: "action",
                    name: a.name.to_string(),
                });
            }
            let mut declared = BTreeMap::new();
            for p in &a.params {
                if declared.insert(&*p.name, &p.ty).is_some() {
                    return Err(ModelError::Duplicate {
                        kind: "parameter",
                        name: p.name.to_string(),
                    });
                }
                if !(p.ty.is_int() || p.ty.user_name().is_some()) {
                    return Err(ModelError::TypeMismatch(format!(
                        "parameter `{}` of `{}` must be a user type or bounded integer",
                        p.name, a.name
                    )));
                }
                self.check_type(&p.ty)?;
            }
            for pre in &a.preconditions {
                self.check_bool(pre, "precondition")?;
                self.check_expr(pre)?;
                check_params(pre, &a.name, &declared)?;
            }
            for eff in &a.effects {
                if eff.target.as_fluent().is_none() || !eff.target.ty().compatible(eff.value.ty())
                {
                    return Err(ModelError::TypeMismatch(format!(
                        "ill-typed effect {eff} in `{}`",
                        a.name
                    )));
                }
                let mut parts = vec![&eff.target, &eff.value];
                if let Some(c) = &eff.condition {
                    self.check_bool(c, "effect condition")?;
                    parts.push(c);
                }
                for e in parts {
                    self.check_expr(e)?;
                    check_params(e, &a.name, &declared)?;
                }
            }
        }
        for g in self.goals() {
            self.check_bool(g, "goal")?;
            if !g.is_closed() {
                return Err(ModelError::OpenGoal(g.to_string()));
            }
            self.check_expr(g)?;
        }
        Ok(())
    }

    fn check_coverage(&self) -> Result<(), ModelError> {
        for f in self.fluents() {
            if f.default.is_some() || f.value_type.base().is_bool() {
                continue;
            }
            let groundings = match self.signature_groundings(&f.params) {
                Ok(g) => g,
                // Fluents over empty types have no instances to initialise.
                Err(ModelError::EmptyType(_)) => continue,
                Err(e) => return Err(e),
            };
            let dims = f.value_type.dims();
            for args in groundings {
                let mut covered = vec![false; f.value_type.cell_count()];
                for iv in self
                    .init()
                    .iter()
                    .filter(|iv| iv.fluent == f.name && iv.args == args)
                {
                    // Cells under the assigned prefix form one contiguous row-major block.
                    let mut start = 0;
                    let mut stride = covered.len();
                    for (level, &i) in iv.indices.iter().enumerate() {
                        stride /= dims[level];
                        start += i * stride;
                    }
                    covered[start..start + stride].iter_mut().for_each(|c| *c = true);
                }
                if let Some(missing) = covered.iter().position(|c| !c) {
                    let mut rest = missing;
                    let mut cell = String::new();
                    let mut stride = covered.len();
                    for d in &dims {
                        stride /= d;
                        cell.push_str(&format!("[{}]", rest / stride));
                        rest %= stride;
                    }
                    return Err(ModelError::MissingInitialValue(format!(
                        "{}{cell}",
                        GroundFluent::new(&f.name, args)
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_type(&self, ty: &Type) -> Result<(), ModelError> {
        ty.validate()?;
        if let Some(name) = ty.base().user_name() {
            if self.user_type(name).is_none() {
                return Err(ModelError::Unknown {
                    kind: "type",
                    name: name.to_string(),
                });
            }
        }
        Ok(())
    }

    fn check_bool(&self, e: &Expr, what: &str) -> Result<(), ModelError> {
        if e.ty().is_bool() {
            Ok(())
        } else {
            Err(ModelError::TypeMismatch(format!(
                "{what} `{e}` is not bool"
            )))
        }
    }

    /// References inside `e` must resolve against this problem's declarations.
    fn check_expr(&self, e: &Expr) -> Result<(), ModelError> {
        let mut result = Ok(());
        e.walk(&mut |node| {
            if result.is_err() {
                return;
            }
            match node.kind() {
                ExprKind::Object(o) => {
                    if self.object_type(o) != Some(node.ty()) {
                        result = Err(ModelError::Unknown {
                            kind: "object",
                            name: format!("{o} of type {}", node.ty()),
                        });
                    }
                }
                ExprKind::Fluent(access) => match self.fluent(&access.name) {
                    Some(f)
                        if f.value_type == access.value_type
                            && f.params.len() == access.args.len()
                            && f.params.iter().zip(&access.args).all(|(p, a)| &p.ty == a.ty()) => {}
                    Some(_) => {
                        result = Err(ModelError::TypeMismatch(format!(
                            "access `{node}` does not match the declaration of `{}`",
                            access.name
                        )))
                    }
                    None => {
                        result = Err(ModelError::Unknown {
                            kind: "fluent",
                            name: access.name.to_string(),
                        })
                    }
                },
                _ => {}
            }
        });
        result
    }
}

/// Incremental construction of a [`Problem`].
pub struct ProblemBuilder {
    parts: ProblemParts,
}

impl ProblemBuilder {
    pub fn user_type(&mut self, name: &str) -> Result<Type, ModelError> {
        if self.parts.types.iter().any(|t| &*t.name == name) {
            return Err(ModelError::Duplicate {
                kind: "type",
                name: name.to_string(),
            });
        }
        self.parts.types.push(UserType {
            name: name.into(),
            objects: Vec::new(),
        });
        Ok(Type::user(name))
    }

    pub fn object(&mut self, name: &str, ty: &Type) -> Result<Expr, ModelError> {
        if self
            .parts
            .types
            .iter()
            .any(|t| t.objects.iter().any(|o| &**o == name))
        {
            return Err(ModelError::Duplicate {
                kind: "object",
                name: name.to_string(),
            });
        }
        let type_name = ty.user_name().ok_or_else(|| {
            ModelError::TypeMismatch(format!("object `{name}` needs a user type, got {ty}"))
        })?;
        let t = self
            .parts
            .types
            .iter_mut()
            .find(|t| &*t.name == type_name)
            .ok_or_else(|| ModelError::Unknown {
                kind: "type",
                name: type_name.to_string(),
            })?;
        t.objects.push(name.into());
        Expr::object(name, ty)
    }

    pub fn has_object(&self, name: &str) -> bool {
        self.parts
            .types
            .iter()
            .any(|t| t.objects.iter().any(|o| &**o == name))
    }

    pub fn add_fluent(&mut self, fluent: Fluent) -> Result<Fluent, ModelError> {
        if self.parts.fluents.iter().any(|f| f.name == fluent.name) {
            return Err(ModelError::Duplicate {
                kind: "fluent",
                name: fluent.name.to_string(),
            });
        }
        fluent.value_type.validate()?;
        self.parts.fluents.push(fluent.clone());
        Ok(fluent)
    }

    /// Declares a fluent; `params` are user-typed signature parameters.
    pub fn fluent(
        &mut self,
        name: &str,
        params: &[(&str, Type)],
        value_type: Type,
    ) -> Result<Fluent, ModelError> {
        let params = params
            .iter()
            .map(|(n, t)| Param::new(n, t.clone()))
            .collect();
        self.add_fluent(Fluent::new(name, params, value_type))
    }

    pub fn set_default(&mut self, fluent: &Fluent, value: impl Into<Value>) -> Result<(), ModelError> {
        let f = self
            .parts
            .fluents
            .iter_mut()
            .find(|f| f.name == fluent.name)
            .ok_or_else(|| ModelError::Unknown {
                kind: "fluent",
                name: fluent.name.to_string(),
            })?;
        f.default = Some(value.into());
        Ok(())
    }

    /// Sets the initial value of a constant access (full or partial).
    pub fn set_initial_value(&mut self, target: &Expr, value: impl Into<Value>) -> Result<(), ModelError> {
        let iv = InitialValue::from_target(target, value.into())?;
        self.parts.init.push(iv);
        Ok(())
    }

    pub fn add_action(&mut self, action: Action) -> Result<(), ModelError> {
        if self.parts.actions.iter().any(|a| a.name == action.name) {
            return Err(ModelError::Duplicate {
                kind: "action",
                name: action.name.to_string(),
            });
        }
        self.parts.actions.push(action);
        Ok(())
    }

    pub fn add_goal(&mut self, goal: Expr) -> Result<(), ModelError> {
        if !goal.ty().is_bool() {
            return Err(ModelError::TypeMismatch(format!("goal `{goal}` is not bool")));
        }
        self.parts.goals.push(goal);
        Ok(())
    }

    pub fn build(self) -> Result<Problem, ModelError> {
        Problem::from_parts(self.parts)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem {}", self.name())?;
        for t in self.types() {
            writeln!(f, "type {} = {{{}}}", t.name, t.objects.join(", "))?;
        }
        writeln!(f, "fluents = [")?;
        for fl in self.fluents() {
            write!(f, "  {} {}", fl.value_type, fl.name)?;
            if !fl.params.is_empty() {
                let ps: Vec<String> = fl.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
                write!(f, "({})", ps.join(", "))?;
            }
            if let Some(d) = &fl.default {
                write!(f, " := {d}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "]")?;
        writeln!(f, "initial values = [")?;
        for iv in self.init() {
            writeln!(f, "  {iv}")?;
        }
        writeln!(f, "]")?;
        for a in self.actions() {
            writeln!(f, "{a}")?;
        }
        writeln!(f, "goals = [")?;
        for g in self.goals() {
            writeln!(f, "  {g}")?;
        }
        write!(f, "]")
    }
}
