use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Map;

use super::{ModelError, Value};

/// One plan entry: an action name and its argument values, in parameter order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanStep {
    pub action: String,
    pub args: Vec<(String, Value)>,
}

impl PlanStep {
    pub fn new(action: &str) -> PlanStep {
        PlanStep {
            action: action.to_string(),
            args: Vec::new(),
        }
    }

    pub fn arg(mut self, name: &str, value: impl Into<Value>) -> PlanStep {
        self.args.push((name.to_string(), value.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.args.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.action)?;
        if self.args.is_empty() {
            return Ok(());
        }
        write!(f, "(")?;
        for (i, (n, v)) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, ")")
    }
}

/// Ordered sequence of action applications.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn new(steps: Vec<PlanStep>) -> Plan {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses the text form: one `name(arg=value, ...)` per line. Blank lines
    /// and lines starting with `;` or `#` are skipped; `name` alone means no arguments.
    pub fn parse_text(text: &str) -> Result<Plan, ModelError> {
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| ModelError::Invalid(format!("plan line {}: {why}: `{line}`", lineno + 1));
            let (name, rest) = match line.find('(') {
                Some(open) => {
                    let inner = line[open + 1..]
                        .strip_suffix(')')
                        .ok_or_else(|| bad("missing closing parenthesis"))?;
                    (&line[..open], inner)
                }
                None => (line, ""),
            };
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(bad("invalid action name"));
            }
            let mut step = PlanStep::new(name);
            for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (k, v) = part.split_once('=').ok_or_else(|| bad("expected arg=value"))?;
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty() || v.is_empty() {
                    return Err(bad("expected arg=value"));
                }
                let value = match v {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    _ => v
                        .parse::<i64>()
                        .map(Value::Int)
                        .unwrap_or_else(|_| Value::object(v)),
                };
                step.args.push((k.to_string(), value));
            }
            steps.push(step);
        }
        Ok(Plan { steps })
    }

    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let mut args = Map::new();
                for (k, v) in &s.args {
                    args.insert(k.clone(), scalar_to_json(v));
                }
                serde_json::to_value(JsonStep {
                    action: s.action.clone(),
                    args,
                })
                .expect("plan steps serialise")
            })
            .collect();
        serde_json::Value::Array(steps)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Plan, ModelError> {
        let steps: Vec<JsonStep> = serde_json::from_value(value.clone())
            .map_err(|e| ModelError::Invalid(format!("malformed JSON plan: {e}")))?;
        let steps = steps
            .into_iter()
            .map(|s| {
                let args = s
                    .args
                    .into_iter()
                    .map(|(k, v)| scalar_from_json(&v).map(|v| (k, v)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(PlanStep {
                    action: s.action,
                    args,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(Plan { steps })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonStep {
    action: String,
    #[serde(default)]
    args: Map<String, serde_json::Value>,
}

fn scalar_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Bool(b) => serde_json::Value::Bool(*b),
        Value::Int(i) => serde_json::Value::from(*i),
        Value::Object(o) => serde_json::Value::String(o.to_string()),
        Value::Array(items) => serde_json::Value::Array(items.iter().map(scalar_to_json).collect()),
    }
}

fn scalar_from_json(v: &serde_json::Value) -> Result<Value, ModelError> {
    match v {
        serde_json::Value::Bool(b) => Ok(Value::Bool(*b)),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| ModelError::Invalid(format!("non-integer plan argument {n}"))),
        serde_json::Value::String(s) => Ok(Value::object(s)),
        other => Err(ModelError::Invalid(format!("unsupported plan argument {other}"))),
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_parses_negative_ints_and_objects() {
        let plan = Plan::parse_text(
            "; comment\nmove_horizontal_car(v=A, r=2, c=1, m=-2)\n\nmove_right_0_1\nmove_right_0_1()\n",
        )
        .unwrap();
        assert_eq!(plan.len(), 3);
        assert_eq!(plan.steps[0].get("m"), Some(&Value::Int(-2)));
        assert_eq!(plan.steps[0].get("v"), Some(&Value::object("A")));
        assert_eq!(plan.steps[1], plan.steps[2]);
        assert_eq!(
            plan.steps[0].to_string(),
            "move_horizontal_car(v=A, r=2, c=1, m=-2)"
        );
    }

    #[test]
    fn text_and_json_forms_agree() {
        let plan = Plan::new(vec![
            PlanStep::new("move").arg("p1", "P00").arg("p2", "P10"),
            PlanStep::new("slide_up_1_0"),
        ]);
        assert_eq!(Plan::parse_text(&plan.to_text()).unwrap(), plan);
        assert_eq!(Plan::from_json(&plan.to_json()).unwrap(), plan);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(Plan::parse_text("move(p1 P00)").is_err());
        assert!(Plan::parse_text("move(p1=P00").is_err());
    }
}
