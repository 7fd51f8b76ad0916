//! Type system, expressions, fluents, actions, states, plans and the problem container.

mod expr;
mod plan;
mod problem;
mod state;
mod types;

pub use expr::{Expr, ExprKind, FluentAccess};
pub use plan::{Plan, PlanStep};
pub use problem::{
    Action, ActionBuilder, Effect, Fluent, InitialValue, Param, Problem, ProblemBuilder,
    ProblemParts, UserType,
};
pub use state::{GroundFluent, State};
pub use types::{Type, Value};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("array size must exceed one, got {0}")]
    ArraySize(usize),
    #[error("empty integer range [{lower}, {upper}]")]
    EmptyIntRange { lower: i64, upper: i64 },
    #[error("no initial value and no default for {0}")]
    MissingInitialValue(String),
    #[error("parameter `{param}` is not declared by action `{action}`")]
    UnboundParameter { action: String, param: String },
    #[error("user type {0} has no objects")]
    EmptyType(String),
    #[error("goal `{0}` has free parameters")]
    OpenGoal(String),
    #[error("{0}")]
    Invalid(String),
}
