use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::Value;

/// Fluent instance with every signature parameter bound to an object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundFluent {
    pub name: Arc<str>,
    pub args: Vec<Arc<str>>,
}

impl GroundFluent {
    pub fn new(name: &str, args: Vec<Arc<str>>) -> GroundFluent {
        GroundFluent {
            name: name.into(),
            args,
        }
    }
}

impl fmt::Display for GroundFluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// Total assignment of values to ground fluent instances. Array-typed
/// fluents hold their whole array value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    values: BTreeMap<GroundFluent, Value>,
}

impl State {
    pub fn from_map(values: BTreeMap<GroundFluent, Value>) -> State {
        State { values }
    }

    pub fn get(&self, key: &GroundFluent) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn get_mut(&mut self, key: &GroundFluent) -> Option<&mut Value> {
        self.values.get_mut(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroundFluent, &Value)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scalar view: array fluents split into cells named `name_i_j`, the
    /// naming used by the array flattening compiler.
    pub fn cells(&self) -> BTreeMap<GroundFluent, Value> {
        let mut out = BTreeMap::new();
        for (key, value) in &self.values {
            for (path, cell) in value.cells() {
                let mut name = key.name.to_string();
                for i in path {
                    name.push_str(&format!("_{i}"));
                }
                out.insert(GroundFluent::new(&name, key.args.clone()), cell.clone());
            }
        }
        out
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
