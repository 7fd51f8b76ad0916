use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::compile::UndefinednessMode;
use crate::eval::{evaluate, evaluate_bool, locate, Binding, EvalError, Location, OutOfRange};
use crate::model::{ModelError, Plan, PlanStep, Problem, State, Value};

/// A plan that cannot even be interpreted against the problem. Steps are
/// stored 0-based and displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("step {}: unknown action `{name}`", .step + 1)]
    UnknownAction { step: usize, name: String },
    #[error("step {}: `{action}` expects parameters ({expected}), got ({got})", .step + 1)]
    Arity {
        step: usize,
        action: String,
        expected: String,
        got: String,
    },
    #[error("step {}: value {value} does not fit parameter `{param}` of type {ty}", .step + 1)]
    BadArgument {
        step: usize,
        param: String,
        value: String,
        ty: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// First step that could not be applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Zero-based step index.
    pub step: usize,
    pub action: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub failure: Option<Failure>,
    /// Goals that do not hold in the final state.
    pub unmet_goals: Vec<String>,
    pub final_state: State,
    pub steps_applied: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none() && self.unmet_goals.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(fail) = &self.failure {
            return write!(
                f,
                "invalid: step {} ({}) is not applicable: {}",
                fail.step + 1,
                fail.action,
                fail.reason
            );
        }
        if !self.unmet_goals.is_empty() {
            return write!(f, "invalid: goals not reached: {}", self.unmet_goals.join("; "));
        }
        write!(f, "valid ({} steps)", self.steps_applied)
    }
}

/// Simulates `plan` from the initial state and checks the goals.
///
/// In permissive mode conditions read through out-of-range accesses are
/// false at the nearest Boolean ancestor, and an out-of-range access in an
/// effect target or value makes the step inapplicable. In restrictive mode
/// every out-of-range access fails the step.
pub fn validate(
    problem: &Problem,
    plan: &Plan,
    mode: UndefinednessMode,
) -> Result<ValidationReport, ValidateError> {
    let policy = match mode {
        UndefinednessMode::Permissive => OutOfRange::FoldToFalse,
        UndefinednessMode::Restrictive => OutOfRange::Error,
    };
    let mut state = problem.initial_state()?;
    for (i, step) in plan.steps.iter().enumerate() {
        let binding = bind(problem, i, step)?;
        match apply(problem, &state, &binding, policy)? {
            Ok(next) => state = next,
            Err(reason) => {
                return Ok(ValidationReport {
                    failure: Some(Failure {
                        step: i,
                        action: step.to_string(),
                        reason,
                    }),
                    unmet_goals: Vec::new(),
                    final_state: state,
                    steps_applied: i,
                })
            }
        }
    }
    let mut unmet_goals = Vec::new();
    for g in problem.goals() {
        match evaluate_bool(g, &state, &Binding::new(), policy) {
            Ok(true) => {}
            Ok(false) => unmet_goals.push(g.to_string()),
            Err(EvalError::OutOfRange { access }) => {
                unmet_goals.push(format!("{g} (undefined array access {access})"))
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ValidationReport {
        failure: None,
        unmet_goals,
        final_state: state,
        steps_applied: plan.len(),
    })
}

fn bind<'a>(problem: &'a Problem, i: usize, step: &PlanStep) -> Result<(Binding, &'a crate::model::Action), ValidateError> {
    let action = problem
        .action(&step.action)
        .ok_or_else(|| ValidateError::UnknownAction {
            step: i,
            name: step.action.clone(),
        })?;
    let expected: Vec<&str> = action.params.iter().map(|p| &*p.name).collect();
    let mut got: Vec<&str> = step.args.iter().map(|(n, _)| n.as_str()).collect();
    let mut sorted_expected = expected.clone();
    sorted_expected.sort_unstable();
    got.sort_unstable();
    if sorted_expected != got {
        return Err(ValidateError::Arity {
            step: i,
            action: step.action.clone(),
            expected: expected.join(", "),
            got: step.args.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", "),
        });
    }
    let mut binding = Binding::new();
    for p in &action.params {
        let v = step.get(&p.name).expect("arity checked");
        if !problem.conforms(v, &p.ty) {
            return Err(ValidateError::BadArgument {
                step: i,
                param: p.name.to_string(),
                value: v.to_string(),
                ty: p.ty.to_string(),
            });
        }
        binding.insert(&p.name, v.clone());
    }
    Ok((binding, action))
}

type Applied = Result<State, String>;

fn apply(
    problem: &Problem,
    state: &State,
    (binding, action): &(Binding, &crate::model::Action),
    policy: OutOfRange,
) -> Result<Applied, ValidateError> {
    for pre in &action.preconditions {
        match evaluate_bool(pre, state, binding, policy) {
            Ok(true) => {}
            Ok(false) => return Ok(Err(format!("precondition {pre} is false"))),
            Err(EvalError::OutOfRange { access }) => {
                return Ok(Err(format!("undefined array access {access} in precondition {pre}")))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut writes: BTreeMap<Location, Value> = BTreeMap::new();
    for eff in &action.effects {
        // Targets and values are resolved even when the condition is false:
        // an undefined access there makes the whole action inapplicable.
        let located = locate(&eff.target, state, binding)
            .and_then(|loc| evaluate(&eff.value, state, binding).map(|v| (loc, v)));
        let (loc, value) = match located {
            Ok(x) => x,
            Err(EvalError::OutOfRange { access }) => {
                return Ok(Err(format!("undefined array access {access} in effect {eff}")))
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(c) = &eff.condition {
            match evaluate_bool(c, state, binding, policy) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(EvalError::OutOfRange { access }) => {
                    return Ok(Err(format!("undefined array access {access} in condition {c}")))
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !problem.conforms(&value, eff.target.ty()) {
            return Ok(Err(format!(
                "value {value} is outside the type {} of {loc}",
                eff.target.ty()
            )));
        }
        match writes.get(&loc) {
            Some(old) if *old != value => {
                return Ok(Err(format!("conflicting assignments {old} and {value} to {loc}")))
            }
            Some(_) => {}
            None => {
                writes.insert(loc, value);
            }
        }
    }
    let mut next = state.clone();
    for (loc, value) in writes {
        let cell = next
            .get_mut(&loc.fluent)
            .and_then(|v| v.at_mut(&loc.path))
            .ok_or_else(|| EvalError::MissingFluent(loc.to_string()))?;
        *cell = value;
    }
    Ok(Ok(next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, Expr, Type};

    fn counter_problem() -> Problem {
        let mut pb = Problem::builder("counter");
        let x = pb.fluent("x", &[], Type::int(0, 2).unwrap()).unwrap();
        pb.set_default(&x, 0i64).unwrap();
        let mut inc = Action::builder("inc");
        inc.effect(
            x.get().unwrap(),
            Expr::plus(vec![x.get().unwrap(), Expr::int(1)]).unwrap(),
        )
        .unwrap();
        pb.add_action(inc.build().unwrap()).unwrap();
        pb.add_goal(Expr::equals(x.get().unwrap(), Expr::int(2)).unwrap())
            .unwrap();
        pb.build().unwrap()
    }

    fn plan(n: usize) -> Plan {
        Plan::new(vec![PlanStep::new("inc"); n])
    }

    #[test]
    fn accepts_reaching_plan() {
        let r = validate(&counter_problem(), &plan(2), UndefinednessMode::Restrictive).unwrap();
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn reports_unmet_goal_and_bounds() {
        let p = counter_problem();
        let short = validate(&p, &plan(1), UndefinednessMode::Restrictive).unwrap();
        assert!(!short.is_valid());
        assert_eq!(short.unmet_goals.len(), 1);
        let long = validate(&p, &plan(3), UndefinednessMode::Restrictive).unwrap();
        assert_eq!(long.failure.unwrap().step, 2);
    }

    #[test]
    fn malformed_steps_are_errors() {
        let p = counter_problem();
        let unknown = Plan::new(vec![PlanStep::new("dec")]);
        assert!(matches!(
            validate(&p, &unknown, UndefinednessMode::Restrictive),
            Err(ValidateError::UnknownAction { .. })
        ));
        let extra = Plan::new(vec![PlanStep::new("inc").arg("k", 1i64)]);
        assert!(matches!(
            validate(&p, &extra, UndefinednessMode::Restrictive),
            Err(ValidateError::Arity { .. })
        ));
    }
}
