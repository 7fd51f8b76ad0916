use std::collections::{BTreeMap, BTreeSet};

const RESERVED: &[&str] = &[
    "action", "and", "assign", "constants", "decrease", "define", "domain", "effect", "either",
    "exists", "forall", "functions", "goal", "imply", "increase", "init", "not", "number",
    "object", "objects", "or", "parameters", "precondition", "predicates", "problem",
    "requirements", "scale-down", "scale-up", "types", "when",
];

/// Deterministic, injective mapping to PDDL identifiers.
///
/// A name is lowercased, `-` becomes `m` (so `-2` reads `m2`), any other
/// character outside `[a-z0-9_]` becomes `_`, names not starting with a
/// letter get an `x` prefix and reserved words a `_` suffix. Clashes with an
/// earlier name get `_2`, `_3`, … in registration order.
#[derive(Debug, Clone, Default)]
pub struct Namer {
    by_key: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Namer {
    pub fn new() -> Namer {
        Namer::default()
    }

    /// Sanitises `raw` without registering it.
    pub fn plain(&self, raw: &str) -> String {
        let mut s: String = raw
            .chars()
            .map(|c| match c.to_ascii_lowercase() {
                '-' => 'm',
                c @ ('a'..='z' | '0'..='9' | '_') => c,
                _ => '_',
            })
            .collect();
        if !s.starts_with(|c: char| c.is_ascii_lowercase()) {
            s.insert(0, 'x');
        }
        if RESERVED.contains(&s.as_str()) {
            s.push('_');
        }
        s
    }

    /// Registers `raw` under `key` and returns its identifier. Registering a
    /// key twice returns the first identifier.
    pub fn global(&mut self, key: &str, raw: &str) -> String {
        if let Some(name) = self.by_key.get(key) {
            return name.clone();
        }
        let base = self.plain(raw);
        let mut name = base.clone();
        let mut n = 2;
        while self.used.contains(&name) {
            name = format!("{base}_{n}");
            n += 1;
        }
        self.used.insert(name.clone());
        self.by_key.insert(key.to_string(), name.clone());
        name
    }

    /// Registers a name that is its own key, such as a parameter.
    pub fn local(&mut self, raw: &str) -> String {
        self.global(raw, raw)
    }

    pub fn get(&self, key: &str) -> &str {
        self.by_key.get(key).map(String::as_str).unwrap_or("undeclared")
    }
}
