//! A strict checker for the PDDL fragment the exporter emits: it parses the
//! files, resolves every name, checks arities and argument types, and checks
//! that each language feature in use is covered by a declared requirement.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct LintError {
    pub line: usize,
    pub message: String,
}

const KNOWN_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":equality",
    ":conditional-effects",
    ":numeric-fluents",
];

/// Declarations read from a domain file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainSummary {
    pub name: String,
    pub requirements: BTreeSet<String>,
    pub types: BTreeSet<String>,
    /// Constant name to type.
    pub constants: BTreeMap<String, String>,
    /// Predicate name to parameter types.
    pub predicates: BTreeMap<String, Vec<String>>,
    pub functions: BTreeMap<String, Vec<String>>,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn line(&self) -> usize {
        match self {
            Sx::Atom(_, l) | Sx::List(_, l) => *l,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sx::Atom(a, _) => Some(a),
            Sx::List(..) => None,
        }
    }

    fn list(&self) -> Option<&[Sx]> {
        match self {
            Sx::List(items, _) => Some(items),
            Sx::Atom(..) => None,
        }
    }

    /// Head keyword of a list, if it is an atom.
    fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, LintError> {
    Err(LintError {
        line,
        message: message.into(),
    })
}

fn parse(text: &str) -> Result<Sx, LintError> {
    let mut stack: Vec<(Vec<Sx>, usize)> = Vec::new();
    let mut done: Option<Sx> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split(';').next().unwrap_or("");
        let spaced = code.replace('(', " ( ").replace(')', " ) ");
        for tok in spaced.split_whitespace() {
            if done.is_some() {
                return err(line, format!("text after the end of the definition: `{tok}`"));
            }
            match tok {
                "(" => stack.push((Vec::new(), line)),
                ")" => {
                    let (items, start) = stack.pop().map_or_else(|| err(line, "unbalanced `)`"), Ok)?;
                    let node = Sx::List(items, start);
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(node),
                        None => done = Some(node),
                    }
                }
                _ => {
                    check_token(tok, line)?;
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(Sx::Atom(tok.to_string(), line)),
                        None => return err(line, format!("`{tok}` outside any list")),
                    }
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return err(*start, "unclosed `(`");
    }
    done.map_or_else(|| err(1, "empty file"), Ok)
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

fn is_number(s: &str) -> bool {
    let mut parts = s.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    !int.is_empty()
        && int.chars().all(|c| c.is_ascii_digit())
        && parts.next().is_none_or(|f| !f.is_empty() && f.chars().all(|c| c.is_ascii_digit()))
}

fn check_token(tok: &str, line: usize) -> Result<(), LintError> {
    let ok = is_name(tok)
        || is_number(tok)
        || tok.strip_prefix('?').is_some_and(is_name)
        || tok.strip_prefix(':').is_some_and(is_name)
        || ["=", "<", "<=", ">", ">=", "+", "-", "*", "/"].contains(&tok);
    if ok {
        Ok(())
    } else {
        err(line, format!("malformed token `{tok}`"))
    }
}

fn expect_name(sx: &Sx, what: &str) -> Result<String, LintError> {
    match sx.atom() {
        Some(a) if is_name(a) => Ok(a.to_string()),
        _ => err(sx.line(), format!("expected {what}")),
    }
}

/// `a b - t c - u` style list; untyped names get `object`.
fn typed_list(items: &[Sx], variables: bool) -> Result<Vec<(String, String)>, LintError> {
    let mut out = Vec::new();
    let mut pending = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let a = items[i].atom().map_or_else(|| err(items[i].line(), "expected a name"), Ok)?;
        if a == "-" {
            let ty = items
                .get(i + 1)
                .map_or_else(|| err(items[i].line(), "missing type after `-`"), |t| expect_name(t, "a type"))?;
            if pending.is_empty() {
                return err(items[i].line(), "type without names");
            }
            out.extend(pending.drain(..).map(|n| (n, ty.clone())));
            i += 2;
            continue;
        }
        let name = if variables {
            match a.strip_prefix('?') {
                Some(v) if is_name(v) => a.to_string(),
                _ => return err(items[i].line(), format!("expected a variable, got `{a}`")),
            }
        } else if is_name(a) {
            a.to_string()
        } else {
            return err(items[i].line(), format!("expected a name, got `{a}`"));
        };
        pending.push(name);
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| (n, "object".to_string())));
    Ok(out)
}

struct Checker<'a> {
    d: &'a DomainSummary,
    /// Objects visible besides the domain constants.
    objects: &'a BTreeMap<String, String>,
}

impl Checker<'_> {
    fn need(&self, req: &str, line: usize, what: &str) -> Result<(), LintError> {
        if self.d.requirements.contains(req) {
            Ok(())
        } else {
            err(line, format!("{what} requires {req}"))
        }
    }

    fn term_type(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<String, LintError> {
        let a = sx.atom().map_or_else(|| err(sx.line(), "expected a term"), Ok)?;
        let found = if a.starts_with('?') {
            vars.get(a)
        } else {
            self.d.constants.get(a).or_else(|| self.objects.get(a))
        };
        found.cloned().map_or_else(|| err(sx.line(), format!("undeclared term `{a}`")), Ok)
    }

    fn args(&self, sx: &Sx, sig: &[String], vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        let items = sx.list().unwrap_or(&[]);
        let name = sx.head().unwrap_or("");
        if items.len() - 1 != sig.len() {
            return err(sx.line(), format!("`{name}` takes {} arguments, got {}", sig.len(), items.len() - 1));
        }
        for (arg, expected) in items[1..].iter().zip(sig) {
            let ty = self.term_type(arg, vars)?;
            if *expected != "object" && ty != *expected {
                return err(arg.line(), format!("argument of type {ty} where `{name}` expects {expected}"));
            }
        }
        Ok(())
    }

    fn atom(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        let name = sx.head().map_or_else(|| err(sx.line(), "expected an atom"), Ok)?;
        let sig = self
            .d
            .predicates
            .get(name)
            .map_or_else(|| err(sx.line(), format!("undeclared predicate `{name}`")), Ok)?;
        self.args(sx, sig, vars)
    }

    fn fexp(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        if let Some(a) = sx.atom() {
            return if is_number(a) { Ok(()) } else { err(sx.line(), format!("`{a}` is not numeric")) };
        }
        let items = sx.list().unwrap();
        match sx.head() {
            Some("+" | "*" | "/") if items.len() == 3 => {
                self.fexp(&items[1], vars)?;
                self.fexp(&items[2], vars)
            }
            Some("-") if items.len() == 2 || items.len() == 3 => items[1..].iter().try_for_each(|x| self.fexp(x, vars)),
            Some(f) => {
                let sig = self
                    .d
                    .functions
                    .get(f)
                    .map_or_else(|| err(sx.line(), format!("undeclared function `{f}`")), Ok)?;
                self.args(sx, sig, vars)
            }
            None => err(sx.line(), "malformed numeric expression"),
        }
    }

    fn is_term(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> bool {
        self.term_type(sx, vars).is_ok()
    }

    fn gd(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        let items = sx.list().map_or_else(|| err(sx.line(), "expected a formula"), Ok)?;
        let line = sx.line();
        match sx.head() {
            Some("and") => items[1..].iter().try_for_each(|x| self.gd(x, vars)),
            Some("or") => {
                self.need(":disjunctive-preconditions", line, "`or`")?;
                items[1..].iter().try_for_each(|x| self.gd(x, vars))
            }
            Some("imply") if items.len() == 3 => {
                self.need(":disjunctive-preconditions", line, "`imply`")?;
                items[1..].iter().try_for_each(|x| self.gd(x, vars))
            }
            Some("not") if items.len() == 2 => {
                self.need(":negative-preconditions", line, "`not` in a condition")?;
                self.gd(&items[1], vars)
            }
            Some("=") if items.len() == 3 && self.is_term(&items[1], vars) && self.is_term(&items[2], vars) => {
                self.need(":equality", line, "object equality")
            }
            Some("=" | "<" | "<=" | ">" | ">=") if items.len() == 3 => {
                self.need(":numeric-fluents", line, "numeric comparison")?;
                self.fexp(&items[1], vars)?;
                self.fexp(&items[2], vars)
            }
            Some("not" | "imply" | "=" | "<" | "<=" | ">" | ">=") => err(line, "wrong number of operands"),
            Some(_) => self.atom(sx, vars),
            None => err(line, "expected a formula"),
        }
    }

    fn literal(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        let items = sx.list().map_or_else(|| err(sx.line(), "expected an effect"), Ok)?;
        match sx.head() {
            Some("not") if items.len() == 2 => self.atom(&items[1], vars),
            Some("assign" | "increase" | "decrease" | "scale-up" | "scale-down") if items.len() == 3 => {
                self.need(":numeric-fluents", sx.line(), "numeric effect")?;
                if items[1].head().is_none_or(|f| !self.d.functions.contains_key(f)) {
                    return err(items[1].line(), "numeric effect target is not a function");
                }
                self.fexp(&items[1], vars)?;
                self.fexp(&items[2], vars)
            }
            Some("and" | "when" | "or" | "forall") => err(sx.line(), "nested effect not allowed here"),
            _ => self.atom(sx, vars),
        }
    }

    fn effect(&self, sx: &Sx, vars: &BTreeMap<String, String>) -> Result<(), LintError> {
        let items = sx.list().map_or_else(|| err(sx.line(), "expected an effect"), Ok)?;
        match sx.head() {
            Some("and") => items[1..].iter().try_for_each(|x| self.effect(x, vars)),
            Some("when") if items.len() == 3 => {
                self.need(":conditional-effects", sx.line(), "`when`")?;
                self.gd(&items[1], vars)?;
                match items[2].head() {
                    Some("and") => items[2].list().unwrap()[1..].iter().try_for_each(|x| self.literal(x, vars)),
                    _ => self.literal(&items[2], vars),
                }
            }
            _ => self.literal(sx, vars),
        }
    }
}

fn section<'a>(sx: &'a Sx, keyword: &str) -> Option<&'a [Sx]> {
    (sx.head() == Some(keyword)).then(|| &sx.list().unwrap()[1..])
}

/// Checks a domain file.
pub fn lint_domain(text: &str) -> Result<DomainSummary, LintError> {
    let root = parse(text)?;
    let items = root.list().unwrap();
    if root.head() != Some("define") || items.len() < 2 {
        return err(root.line(), "expected `(define (domain …) …)`");
    }
    let name = match items[1].list() {
        Some([Sx::Atom(k, _), n]) if k == "domain" => expect_name(n, "a domain name")?,
        _ => return err(items[1].line(), "expected `(domain <name>)`"),
    };
    let mut d = DomainSummary {
        name,
        ..DomainSummary::default()
    };
    let order = [":requirements", ":types", ":constants", ":predicates", ":functions", ":action"];
    let mut last = None;
    let no_objects = BTreeMap::new();
    for sx in &items[2..] {
        let head = sx.head().unwrap_or("");
        let pos = order
            .iter()
            .position(|k| *k == head)
            .map_or_else(|| err(sx.line(), format!("unknown domain section `{head}`")), Ok)?;
        if last.is_some_and(|prev| pos < prev || (pos == prev && head != ":action")) {
            return err(sx.line(), format!("section `{head}` out of order or repeated"));
        }
        last = Some(pos);
        let body = section(sx, head).unwrap();
        match head {
            ":requirements" => {
                for r in body {
                    let r = r.atom().unwrap_or("");
                    if !KNOWN_REQUIREMENTS.contains(&r) {
                        return err(sx.line(), format!("unknown requirement `{r}`"));
                    }
                    d.requirements.insert(r.to_string());
                }
            }
            ":types" => {
                if !d.requirements.contains(":typing") {
                    return err(sx.line(), "`:types` requires :typing");
                }
                for (t, parent) in typed_list(body, false)? {
                    if parent != "object" && !d.types.contains(&parent) {
                        return err(sx.line(), format!("undeclared parent type `{parent}`"));
                    }
                    if !d.types.insert(t.clone()) {
                        return err(sx.line(), format!("type `{t}` declared twice"));
                    }
                }
            }
            ":constants" => {
                for (c, t) in typed_list(body, false)? {
                    if t != "object" && !d.types.contains(&t) {
                        return err(sx.line(), format!("undeclared type `{t}`"));
                    }
                    if d.constants.insert(c.clone(), t).is_some() {
                        return err(sx.line(), format!("constant `{c}` declared twice"));
                    }
                }
            }
            ":predicates" | ":functions" => {
                let numeric = head == ":functions";
                if numeric && !d.requirements.contains(":numeric-fluents") {
                    return err(sx.line(), "`:functions` requires :numeric-fluents");
                }
                let mut i = 0;
                while i < body.len() {
                    let decl = &body[i];
                    let parts = decl.list().map_or_else(|| err(decl.line(), "expected a declaration"), Ok)?;
                    let pname = parts
                        .first()
                        .map_or_else(|| err(decl.line(), "empty declaration"), |n| expect_name(n, "a name"))?;
                    let sig: Vec<String> = typed_list(&parts[1..], true)?.into_iter().map(|(_, t)| t).collect();
                    for t in &sig {
                        if t != "object" && !d.types.contains(t) {
                            return err(decl.line(), format!("undeclared type `{t}`"));
                        }
                    }
                    i += 1;
                    if numeric && body.get(i).and_then(Sx::atom) == Some("-") {
                        if body.get(i + 1).and_then(Sx::atom) != Some("number") {
                            return err(decl.line(), "function type must be `number`");
                        }
                        i += 2;
                    }
                    let clash = d.predicates.contains_key(&pname) || d.functions.contains_key(&pname);
                    if clash {
                        return err(decl.line(), format!("`{pname}` declared twice"));
                    }
                    if numeric {
                        d.functions.insert(pname, sig);
                    } else {
                        d.predicates.insert(pname, sig);
                    }
                }
            }
            ":action" => {
                let aname = body
                    .first()
                    .map_or_else(|| err(sx.line(), "action without a name"), |n| expect_name(n, "an action name"))?;
                if d.actions.contains(&aname) {
                    return err(sx.line(), format!("action `{aname}` declared twice"));
                }
                let mut vars = BTreeMap::new();
                let keys: Vec<&str> = body[1..].iter().step_by(2).map(|k| k.atom().unwrap_or("")).collect();
                if body.len() % 2 != 1 || !matches!(keys.as_slice(), [":parameters", ":precondition", ":effect"] | [":parameters", ":effect"]) {
                    return err(sx.line(), format!("action `{aname}` must list :parameters, :precondition, :effect"));
                }
                let params = body[2].list().map_or_else(|| err(body[2].line(), "expected a parameter list"), Ok)?;
                for (v, t) in typed_list(params, true)? {
                    if t != "object" && !d.types.contains(&t) {
                        return err(body[2].line(), format!("undeclared type `{t}`"));
                    }
                    if vars.insert(v.clone(), t).is_some() {
                        return err(body[2].line(), format!("parameter `{v}` declared twice"));
                    }
                }
                let checker = Checker {
                    d: &d,
                    objects: &no_objects,
                };
                if keys.len() == 3 {
                    checker.gd(&body[4], &vars)?;
                }
                checker.effect(body.last().unwrap(), &vars)?;
                d.actions.push(aname);
            }
            _ => unreachable!(),
        }
    }
    Ok(d)
}

/// Checks a problem file against its domain.
pub fn lint_problem(text: &str, domain: &DomainSummary) -> Result<(), LintError> {
    let root = parse(text)?;
    let items = root.list().unwrap();
    if root.head() != Some("define") || items.len() < 4 {
        return err(root.line(), "expected `(define (problem …) (:domain …) … (:goal …))`");
    }
    match items[1].list() {
        Some([Sx::Atom(k, _), n]) if k == "problem" => expect_name(n, "a problem name")?,
        _ => return err(items[1].line(), "expected `(problem <name>)`"),
    };
    match section(&items[2], ":domain") {
        Some([n]) if n.atom() == Some(domain.name.as_str()) => {}
        _ => return err(items[2].line(), format!("expected `(:domain {})`", domain.name)),
    }
    let mut objects = BTreeMap::new();
    let mut rest = &items[3..];
    if let Some(body) = section(&rest[0], ":objects") {
        for (o, t) in typed_list(body, false)? {
            if t != "object" && !domain.types.contains(&t) {
                return err(rest[0].line(), format!("undeclared type `{t}`"));
            }
            if domain.constants.contains_key(&o) || objects.insert(o.clone(), t).is_some() {
                return err(rest[0].line(), format!("object `{o}` declared twice"));
            }
        }
        rest = &rest[1..];
    }
    let checker = Checker {
        d: domain,
        objects: &objects,
    };
    let (Some(init), Some(goal), true) = (
        rest.first().and_then(|s| section(s, ":init")),
        rest.get(1).and_then(|s| section(s, ":goal")),
        rest.len() == 2,
    ) else {
        return err(root.line(), "expected `(:init …)` followed by `(:goal …)`");
    };
    let no_vars = BTreeMap::new();
    for fact in init {
        match fact.head() {
            Some("=") => {
                let parts = fact.list().unwrap();
                if parts.len() != 3 || parts[1].head().is_none_or(|f| !domain.functions.contains_key(f)) {
                    return err(fact.line(), "expected `(= (<function> …) <number>)`");
                }
                checker.fexp(&parts[1], &no_vars)?;
                checker.fexp(&parts[2], &no_vars)?;
            }
            _ => checker.atom(fact, &no_vars)?,
        }
    }
    match goal {
        [g] => checker.gd(g, &no_vars),
        _ => err(rest[1].line(), "`:goal` takes exactly one formula"),
    }
}

/// Checks a domain and problem pair.
pub fn lint(domain: &str, problem: &str) -> Result<DomainSummary, LintError> {
    let d = lint_domain(domain)?;
    lint_problem(problem, &d)?;
    Ok(d)
}
