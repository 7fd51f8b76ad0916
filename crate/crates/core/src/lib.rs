//! Classical planning with array-typed fluents, `Count` expressions and
//! bounded-integer action parameters.
//!
//! High-level problems are lowered by three compilers, always applied in the
//! order integer parameters, arrays, counts, into plain grounded problems.
//! Those are solved by the built-in forward search, checked by the plan
//! validator, or exported as PDDL.

pub mod cli;
pub mod compile;
pub mod domains;
pub mod eval;
pub mod format;
pub mod model;
pub mod pddl;
pub mod pipeline;
pub mod search;

pub use compile::{CompilationResult, UndefinednessMode};
pub use model::{Action, Effect, Expr, Fluent, Plan, PlanStep, Problem, State, Type, Value};
