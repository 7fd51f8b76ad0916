//! JSON problem files.
//!
//! ```json
//! {
//!   "name": "robot_3x3",
//!   "types": ["Position"],
//!   "objects": {"Position": ["P00", "P01"]},
//!   "fluents": [{"name": "at", "params": [{"name": "p", "type": {"user": "Position"}}], "type": "bool"}],
//!   "actions": [{"name": "go", "params": [...], "preconditions": [expr], "effects": [{"target": expr, "value": expr}]}],
//!   "init": [{"fluent": "at", "args": ["P00"], "indices": [], "value": true}],
//!   "defaults": {"at": false},
//!   "goals": [expr]
//! }
//! ```
//!
//! Types are `"bool"`, `{"int": [lo, hi]}`, `{"user": name}` or
//! `{"array": n, "of": type}`. Values are JSON booleans, integers, strings
//! (objects) and nested arrays. Expressions are `true`/`false`, integers, or
//! `{"op": ..., "args": [...]}` trees; the leaves are
//! `{"op": "object", "name": ...}`, `{"op": "param", "name": ...}` and
//! `{"op": "fluent", "name": ..., "args": [...], "index": [...]}`.
//!
//! A file may instead hold a generator spec such as
//! `{"gen": "robot", "n": 3}`; see [`GenSpec`].

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::domains::{self, DomainError};
use crate::model::{
    Action, Effect, Expr, ExprKind, Fluent, FluentAccess, InitialValue, ModelError, Param,
    Problem, ProblemParts, Type, UserType, Value,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn schema(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Instance generators accepted in place of a problem.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "gen", rename_all = "lowercase", deny_unknown_fields)]
pub enum GenSpec {
    Robot {
        n: usize,
    },
    Delivery,
    Npuzzle {
        tiles: Vec<Vec<i64>>,
    },
    Rushhour {
        grid: String,
    },
    Plotting {
        #[serde(default)]
        colours: Vec<String>,
        grid: Vec<Vec<String>>,
        max_remaining: i64,
    },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Problem, DomainError> {
        match self {
            GenSpec::Robot { n } => domains::robot_grid(*n),
            GenSpec::Delivery => domains::delivery(),
            GenSpec::Npuzzle { tiles } => domains::gen_npuzzle(tiles.len(), tiles),
            GenSpec::Rushhour { grid } => domains::gen_rushhour(&domains::parse_rushhour_line(grid)?),
            GenSpec::Plotting {
                colours,
                grid,
                max_remaining,
            } => {
                let mut colours: Vec<&str> = colours.iter().map(String::as_str).collect();
                if colours.is_empty() {
                    for cell in grid.iter().flatten() {
                        if cell != "N" && !colours.contains(&cell.as_str()) {
                            colours.push(cell);
                        }
                    }
                }
                let rows: Vec<Vec<&str>> = grid
                    .iter()
                    .map(|r| r.iter().map(String::as_str).collect())
                    .collect();
                let columns = rows.first().map_or(0, Vec::len);
                domains::gen_plotting(rows.len(), columns, &colours, &rows, *max_remaining)
            }
        }
    }
}

/// Reads a problem file, running the generator if it is a `gen` spec.
pub fn load_problem(text: &str) -> Result<Problem, FormatError> {
    let json: Json = serde_json::from_str(text)?;
    if json.get("gen").is_some() {
        let spec: GenSpec = serde_json::from_value(json)?;
        return Ok(spec.generate()?);
    }
    problem_from_json(&json)
}

/// Canonical pretty-printed JSON for a problem, newline-terminated.
pub fn save_problem(problem: &Problem) -> String {
    let mut out = serde_json::to_string_pretty(&problem_to_json(problem)).expect("JSON values serialise");
    out.push('\n');
    out
}

pub fn problem_to_json(problem: &Problem) -> Json {
    let parts = problem.parts();
    let mut objects = Map::new();
    for t in &parts.types {
        objects.insert(t.name.to_string(), json!(t.objects.iter().map(|o| o.to_string()).collect::<Vec<_>>()));
    }
    let mut defaults = Map::new();
    for f in &parts.fluents {
        if let Some(d) = &f.default {
            defaults.insert(f.name.to_string(), value_to_json(d));
        }
    }
    json!({
        "name": parts.name,
        "types": parts.types.iter().map(|t| t.name.to_string()).collect::<Vec<_>>(),
        "objects": objects,
        "fluents": parts.fluents.iter().map(|f| json!({
            "name": f.name.to_string(),
            "params": params_to_json(&f.params),
            "type": type_to_json(&f.value_type),
        })).collect::<Vec<_>>(),
        "actions": parts.actions.iter().map(action_to_json).collect::<Vec<_>>(),
        "init": parts.init.iter().map(|iv| json!({
            "fluent": iv.fluent.to_string(),
            "args": iv.args.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "indices": iv.indices,
            "value": value_to_json(&iv.value),
        })).collect::<Vec<_>>(),
        "defaults": defaults,
        "goals": parts.goals.iter().map(expr_to_json).collect::<Vec<_>>(),
    })
}

fn params_to_json(params: &[Param]) -> Vec<Json> {
    params
        .iter()
        .map(|p| json!({"name": p.name.to_string(), "type": type_to_json(&p.ty)}))
        .collect()
}

fn action_to_json(a: &Action) -> Json {
    let effects: Vec<Json> = a
        .effects
        .iter()
        .map(|e| {
            let mut m = Map::new();
            if let Some(c) = &e.condition {
                m.insert("condition".into(), expr_to_json(c));
            }
            m.insert("target".into(), expr_to_json(&e.target));
            m.insert("value".into(), expr_to_json(&e.value));
            Json::Object(m)
        })
        .collect();
    json!({
        "name": a.name.to_string(),
        "params": params_to_json(&a.params),
        "preconditions": a.preconditions.iter().map(expr_to_json).collect::<Vec<_>>(),
        "effects": effects,
    })
}

pub fn type_to_json(t: &Type) -> Json {
    match t {
        Type::Bool => json!("bool"),
        Type::Int { lower, upper } => json!({"int": [lower, upper]}),
        Type::User(n) => json!({"user": n.to_string()}),
        Type::Array { size, element } => json!({"array": size, "of": type_to_json(element)}),
    }
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => json!(b),
        Value::Int(i) => json!(i),
        Value::Object(o) => json!(o.to_string()),
        Value::Array(items) => Json::Array(items.iter().map(value_to_json).collect()),
    }
}

fn op_name(kind: &ExprKind) -> &'static str {
    use ExprKind::*;
    match kind {
        Bool(_) | Int(_) => "const",
        Object(_) => "object",
        Param(_) => "param",
        Fluent(_) => "fluent",
        Array(_) => "array",
        Not(_) => "not",
        And(_) => "and",
        Or(_) => "or",
        Implies(..) => "implies",
        Iff(..) => "iff",
        Equals(..) => "equals",
        Le(..) => "le",
        Lt(..) => "lt",
        Ge(..) => "ge",
        Gt(..) => "gt",
        Plus(_) => "plus",
        Minus(..) => "minus",
        Times(_) => "times",
        Count(_) => "count",
    }
}

pub fn expr_to_json(e: &Expr) -> Json {
    match e.kind() {
        ExprKind::Bool(b) => json!(b),
        ExprKind::Int(i) => json!(i),
        ExprKind::Object(name) => json!({"op": "object", "name": name.to_string()}),
        ExprKind::Param(name) => json!({"op": "param", "name": name.to_string()}),
        ExprKind::Fluent(acc) => json!({
            "op": "fluent",
            "name": acc.name.to_string(),
            "args": acc.args.iter().map(expr_to_json).collect::<Vec<_>>(),
            "index": acc.indices.iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
        kind => json!({
            "op": op_name(kind),
            "args": e.children().into_iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(default)]
    name: String,
    #[serde(default)]
    types: Vec<String>,
    #[serde(default)]
    objects: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    fluents: Vec<RawFluent>,
    #[serde(default)]
    actions: Vec<RawAction>,
    #[serde(default)]
    init: Vec<RawInit>,
    #[serde(default)]
    defaults: Map<String, Json>,
    #[serde(default)]
    goals: Vec<Json>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParam {
    name: String,
    #[serde(rename = "type")]
    ty: Json,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFluent {
    name: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(rename = "type")]
    ty: Json,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    name: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    preconditions: Vec<Json>,
    #[serde(default)]
    effects: Vec<RawEffect>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEffect {
    #[serde(default)]
    condition: Option<Json>,
    target: Json,
    value: Json,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    fluent: String,
    #[serde(default)]
    args: Vec<String>,
    #[serde(default)]
    indices: Vec<usize>,
    value: Json,
}

pub fn problem_from_json(json: &Json) -> Result<Problem, FormatError> {
    let raw: RawProblem = serde_json::from_value(json.clone())?;
    let mut types = Vec::new();
    for name in &raw.types {
        let objects = raw.objects.get(name).cloned().unwrap_or_default();
        types.push(UserType {
            name: name.as_str().into(),
            objects: objects.iter().map(|o| Arc::from(o.as_str())).collect(),
        });
    }
    if let Some(extra) = raw.objects.keys().find(|k| !raw.types.contains(k)) {
        return Err(schema("objects", format!("objects listed for undeclared type `{extra}`")));
    }
    let mut object_types: BTreeMap<&str, Type> = BTreeMap::new();
    for t in &types {
        for o in &t.objects {
            object_types.insert(o, Type::User(t.name.clone()));
        }
    }

    let mut fluents = Vec::new();
    for (i, f) in raw.fluents.iter().enumerate() {
        let path = format!("fluents[{i}]");
        let mut fluent = Fluent::new(
            &f.name,
            params_from_json(&f.params, &path)?,
            type_from_json(&f.ty, &format!("{path}.type"))?,
        );
        if let Some(d) = raw.defaults.get(&f.name) {
            fluent = fluent.with_default(value_from_json(d, &format!("defaults.{}", f.name))?);
        }
        fluents.push(fluent);
    }
    if let Some(extra) = raw.defaults.keys().find(|k| !raw.fluents.iter().any(|f| &f.name == *k)) {
        return Err(schema("defaults", format!("default for undeclared fluent `{extra}`")));
    }

    let ctx = Ctx {
        objects: &object_types,
        fluents: &fluents,
        params: Vec::new(),
    };
    let mut actions = Vec::new();
    for (i, a) in raw.actions.iter().enumerate() {
        let path = format!("actions[{i}]");
        let params = params_from_json(&a.params, &path)?;
        let ctx = Ctx {
            params: params.clone(),
            ..ctx.clone()
        };
        let preconditions = a
            .preconditions
            .iter()
            .enumerate()
            .map(|(j, p)| ctx.expr(p, &format!("{path}.preconditions[{j}]")))
            .collect::<Result<_, _>>()?;
        let mut effects = Vec::new();
        for (j, e) in a.effects.iter().enumerate() {
            let p = format!("{path}.effects[{j}]");
            let target = ctx.expr(&e.target, &format!("{p}.target"))?;
            let value = ctx.expr(&e.value, &format!("{p}.value"))?;
            effects.push(match &e.condition {
                Some(c) => Effect::conditional(ctx.expr(c, &format!("{p}.condition"))?, target, value)?,
                None => Effect::new(target, value)?,
            });
        }
        actions.push(Action {
            name: a.name.as_str().into(),
            params,
            preconditions,
            effects,
        });
    }

    let init = raw
        .init
        .iter()
        .enumerate()
        .map(|(i, iv)| {
            Ok(InitialValue {
                fluent: iv.fluent.as_str().into(),
                args: iv.args.iter().map(|a| Arc::from(a.as_str())).collect(),
                indices: iv.indices.clone(),
                value: value_from_json(&iv.value, &format!("init[{i}].value"))?,
            })
        })
        .collect::<Result<_, FormatError>>()?;
    let goals = raw
        .goals
        .iter()
        .enumerate()
        .map(|(i, g)| ctx.expr(g, &format!("goals[{i}]")))
        .collect::<Result<_, _>>()?;

    Ok(Problem::from_parts(ProblemParts {
        name: raw.name,
        types,
        fluents,
        actions,
        init,
        goals,
    })?)
}

fn params_from_json(params: &[RawParam], path: &str) -> Result<Vec<Param>, FormatError> {
    params
        .iter()
        .enumerate()
        .map(|(i, p)| Ok(Param::new(&p.name, type_from_json(&p.ty, &format!("{path}.params[{i}].type"))?)))
        .collect()
}

pub fn type_from_json(j: &Json, path: &str) -> Result<Type, FormatError> {
    match j {
        Json::String(s) if s == "bool" => Ok(Type::Bool),
        Json::Object(m) if m.len() == 1 && m.contains_key("int") => {
            let bounds: [i64; 2] = serde_json::from_value(m["int"].clone())
                .map_err(|_| schema(path, "`int` expects [lower, upper]"))?;
            Ok(Type::int(bounds[0], bounds[1])?)
        }
        Json::Object(m) if m.len() == 1 && m.contains_key("user") => match &m["user"] {
            Json::String(s) => Ok(Type::user(s)),
            _ => Err(schema(path, "`user` expects a type name")),
        },
        Json::Object(m) if m.len() == 2 && m.contains_key("array") && m.contains_key("of") => {
            let size = m["array"]
                .as_u64()
                .ok_or_else(|| schema(path, "`array` expects a size"))?;
            Ok(Type::array(size as usize, type_from_json(&m["of"], &format!("{path}.of"))?)?)
        }
        other => Err(schema(path, format!("not a type: {other}"))),
    }
}

pub fn value_from_json(j: &Json, path: &str) -> Result<Value, FormatError> {
    match j {
        Json::Bool(b) => Ok(Value::Bool(*b)),
        Json::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| schema(path, format!("not an integer: {n}"))),
        Json::String(s) => Ok(Value::object(s)),
        Json::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| value_from_json(v, &format!("{path}[{i}]")))
            .collect::<Result<_, _>>()
            .map(Value::Array),
        other => Err(schema(path, format!("not a value: {other}"))),
    }
}

#[derive(Clone)]
struct Ctx<'a> {
    objects: &'a BTreeMap<&'a str, Type>,
    fluents: &'a [Fluent],
    params: Vec<Param>,
}

impl Ctx<'_> {
    fn expr(&self, j: &Json, path: &str) -> Result<Expr, FormatError> {
        match j {
            Json::Bool(b) => return Ok(Expr::bool(*b)),
            Json::Number(n) => {
                return n
                    .as_i64()
                    .map(Expr::int)
                    .ok_or_else(|| schema(path, format!("not an integer: {n}")))
            }
            Json::Object(_) => {}
            other => return Err(schema(path, format!("not an expression: {other}"))),
        }
        let op = j
            .get("op")
            .and_then(Json::as_str)
            .ok_or_else(|| schema(path, "missing `op`"))?;
        let name = || {
            j.get("name")
                .and_then(Json::as_str)
                .ok_or_else(|| schema(path, format!("`{op}` needs a `name`")))
        };
        let list = |key: &str| -> Result<Vec<Expr>, FormatError> {
            match j.get(key) {
                None => Ok(Vec::new()),
                Some(Json::Array(items)) => items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| self.expr(x, &format!("{path}.{key}[{i}]")))
                    .collect(),
                Some(_) => Err(schema(path, format!("`{key}` must be a list"))),
            }
        };
        match op {
            "object" => {
                let n = name()?;
                let ty = self
                    .objects
                    .get(n)
                    .ok_or_else(|| schema(path, format!("unknown object `{n}`")))?;
                Ok(Expr::object(n, ty)?)
            }
            "param" => {
                let n = name()?;
                let p = self
                    .params
                    .iter()
                    .find(|p| &*p.name == n)
                    .ok_or_else(|| schema(path, format!("unknown parameter `{n}`")))?;
                Ok(p.expr())
            }
            "fluent" => {
                let n = name()?;
                let f = self
                    .fluents
                    .iter()
                    .find(|f| &*f.name == n)
                    .ok_or_else(|| schema(path, format!("unknown fluent `{n}`")))?;
                Ok(Expr::new(ExprKind::Fluent(FluentAccess {
                    name: f.name.clone(),
                    value_type: f.value_type.clone(),
                    args: list("args")?,
                    indices: list("index")?,
                }))?)
            }
            _ => {
                let args = list("args")?;
                let pair = || -> Result<(Expr, Expr), FormatError> {
                    match <[Expr; 2]>::try_from(args.clone()) {
                        Ok([a, b]) => Ok((a, b)),
                        Err(v) => Err(schema(path, format!("`{op}` takes 2 arguments, got {}", v.len()))),
                    }
                };
                Ok(match op {
                    "array" => Expr::array(args)?,
                    "not" => match <[Expr; 1]>::try_from(args) {
                        Ok([x]) => Expr::not(x)?,
                        Err(v) => return Err(schema(path, format!("`not` takes 1 argument, got {}", v.len()))),
                    },
                    "and" => Expr::and(args)?,
                    "or" => Expr::or(args)?,
                    "plus" => Expr::plus(args)?,
                    "times" => Expr::times(args)?,
                    "count" => Expr::count(args)?,
                    "implies" => pair().and_then(|(a, b)| Ok(Expr::implies(a, b)?))?,
                    "iff" => pair().and_then(|(a, b)| Ok(Expr::iff(a, b)?))?,
                    "equals" => pair().and_then(|(a, b)| Ok(Expr::equals(a, b)?))?,
                    "le" => pair().and_then(|(a, b)| Ok(Expr::le(a, b)?))?,
                    "lt" => pair().and_then(|(a, b)| Ok(Expr::lt(a, b)?))?,
                    "ge" => pair().and_then(|(a, b)| Ok(Expr::ge(a, b)?))?,
                    "gt" => pair().and_then(|(a, b)| Ok(Expr::gt(a, b)?))?,
                    "minus" => pair().and_then(|(a, b)| Ok(Expr::minus(a, b)?))?,
                    other => return Err(schema(path, format!("unknown operator `{other}`"))),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains;

    #[test]
    fn domains_round_trip_byte_identical() {
        let problems = [
            domains::robot_grid(3).unwrap(),
            domains::delivery().unwrap(),
            domains::gen_npuzzle(2, &[vec![1, 2], vec![0, 3]]).unwrap(),
            domains::gen_rushhour("ooooooooooooAAoooooooooooooooooooooo").unwrap(),
            domains::gen_plotting(2, 2, &["R"], &[vec!["R", "R"], vec!["R", "N"]], 1).unwrap(),
        ];
        for p in problems {
            let text = save_problem(&p);
            let back = load_problem(&text).unwrap();
            assert_eq!(save_problem(&back), text, "{}", p.name());
            assert_eq!(back.actions(), p.actions());
            assert_eq!(back.goals(), p.goals());
        }
    }

    #[test]
    fn gen_spec_runs_generator() {
        let p = load_problem(r#"{"gen": "robot", "n": 2}"#).unwrap();
        assert_eq!(p.name(), "robot_2x2");
        let p = load_problem(r#"{"gen": "plotting", "grid": [["R", "B"], ["B", "B"]], "max_remaining": 1}"#).unwrap();
        assert_eq!(p.objects_of(&Type::user("Colour")).len(), 4);
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let text = r#"{"fluents": [{"name": "x", "type": "bool"}], "goals": [{"op": "fluent", "name": "y"}]}"#;
        let err = load_problem(text).unwrap_err().to_string();
        assert_eq!(err, "goals[0]: unknown fluent `y`");
        let text = r#"{"fluents": [{"name": "x", "type": {"int": [3, 1]}}]}"#;
        assert!(load_problem(text).is_err());
    }
}
