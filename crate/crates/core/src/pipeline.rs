//! Chains the compilers in the fixed order integer parameters, arrays, Count,
//! and maps plans of the compiled problem back to source actions.

use std::collections::BTreeMap;
use std::fmt;

use crate::compile::{
    flatten_arrays, ground_int_params, remove_counts, ActionOrigin, CompilationResult,
    CompileError, UndefinednessMode,
};
use crate::eval::Binding;
use crate::model::{ModelError, Plan, PlanStep, Problem};

/// High-level features present in a problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FeatureSet {
    pub has_int_params: bool,
    pub has_arrays: bool,
    pub has_count: bool,
}

impl FeatureSet {
    pub fn of(problem: &Problem) -> FeatureSet {
        let mut exprs: Vec<_> = problem.goals().iter().collect();
        for a in problem.actions() {
            exprs.extend(&a.preconditions);
            for e in &a.effects {
                exprs.extend([&e.target, &e.value]);
                exprs.extend(e.condition.iter());
            }
        }
        FeatureSet {
            has_int_params: problem.actions().iter().any(|a| a.has_int_params()),
            has_arrays: problem.fluents().iter().any(|f| f.value_type.is_array())
                || exprs.iter().any(|e| e.has_array_access()),
            has_count: exprs.iter().any(|e| e.has_count()),
        }
    }

    /// True when a classical planner can take the problem as is.
    pub fn is_empty(&self) -> bool {
        !(self.has_int_params || self.has_arrays || self.has_count)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.has_int_params, "integer parameters"),
            (self.has_arrays, "arrays"),
            (self.has_count, "Count"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        if names.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", names.join(", "))
        }
    }
}

/// One compiler pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pass {
    IntParams,
    Arrays,
    Count,
}

impl Pass {
    /// The order in which [`compile`] runs the passes.
    pub const ORDER: [Pass; 3] = [Pass::IntParams, Pass::Arrays, Pass::Count];

    fn needed(self, features: &FeatureSet) -> bool {
        match self {
            Pass::IntParams => features.has_int_params,
            Pass::Arrays => features.has_arrays,
            Pass::Count => features.has_count,
        }
    }

    pub fn run(self, problem: &Problem, mode: UndefinednessMode) -> Result<CompilationResult, CompileError> {
        match self {
            Pass::IntParams => ground_int_params(problem),
            Pass::Arrays => flatten_arrays(problem, mode),
            Pass::Count => remove_counts(problem),
        }
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::IntParams => "int-params",
            Pass::Arrays => "arrays",
            Pass::Count => "count",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub mode: UndefinednessMode,
    /// Run every pass even when its feature is absent.
    pub force: bool,
}

/// Problem after one pass, kept for inspection.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub pass: Pass,
    pub problem: Problem,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub source: Problem,
    pub problem: Problem,
    pub snapshots: Vec<Snapshot>,
    /// Final action name to source action and integer binding.
    pub action_map: BTreeMap<String, ActionOrigin>,
}

impl Compiled {
    pub fn notes(&self) -> impl Iterator<Item = &str> {
        self.snapshots.iter().flat_map(|s| s.notes.iter().map(String::as_str))
    }

    /// Rewrites a plan of the compiled problem into source actions, with
    /// arguments in the source parameter order.
    pub fn map_plan_back(&self, plan: &Plan) -> Result<Plan, ModelError> {
        plan.steps.iter().map(|s| self.map_step(s)).collect::<Result<_, _>>().map(Plan::new)
    }

    fn map_step(&self, step: &PlanStep) -> Result<PlanStep, ModelError> {
        let origin = self.action_map.get(&step.action).ok_or_else(|| ModelError::Unknown {
            kind: "action",
            name: step.action.clone(),
        })?;
        let mut out = PlanStep::new(&origin.source);
        for p in &origin.params {
            let value = origin
                .binding
                .get(&p.name)
                .or_else(|| step.get(&p.name))
                .ok_or_else(|| ModelError::UnboundParameter {
                    action: step.action.clone(),
                    param: p.name.to_string(),
                })?;
            out = out.arg(&p.name, value.clone());
        }
        Ok(out)
    }
}

/// Removes all high-level features, running only the passes that are needed
/// (or all of them with `options.force`).
pub fn compile(problem: &Problem, options: Options) -> Result<Compiled, CompileError> {
    let features = FeatureSet::of(problem);
    let passes: Vec<Pass> = Pass::ORDER
        .into_iter()
        .filter(|p| options.force || p.needed(&features))
        .collect();
    run_passes(problem, &passes, options.mode)
}

/// Runs the given passes in the given order, composing action maps.
pub fn run_passes(
    problem: &Problem,
    passes: &[Pass],
    mode: UndefinednessMode,
) -> Result<Compiled, CompileError> {
    let mut current = problem.clone();
    let mut action_map = crate::compile::identity_map(problem);
    let mut snapshots = Vec::new();
    for &pass in passes {
        let result = pass.run(&current, mode)?;
        action_map = compose(&action_map, &result.action_map)?;
        current = result.compiled.clone();
        snapshots.push(Snapshot {
            pass,
            problem: result.compiled,
            notes: result.notes,
        });
    }
    Ok(Compiled {
        source: problem.clone(),
        problem: current,
        snapshots,
        action_map,
    })
}

fn compose(
    before: &BTreeMap<String, ActionOrigin>,
    step: &BTreeMap<String, ActionOrigin>,
) -> Result<BTreeMap<String, ActionOrigin>, CompileError> {
    step.iter()
        .map(|(name, o)| {
            let prev = before.get(&o.source).ok_or_else(|| {
                CompileError::Internal(format!("action {} has no recorded origin", o.source))
            })?;
            let binding: Binding = prev.binding.merged(&o.binding);
            Ok((
                name.clone(),
                ActionOrigin {
                    source: prev.source.clone(),
                    binding,
                    params: prev.params.clone(),
                },
            ))
        })
        .collect()
}
