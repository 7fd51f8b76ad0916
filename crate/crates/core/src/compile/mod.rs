//! The three feature-removing compilers.
//!
//! Each pass maps a [`Problem`] to a [`CompilationResult`] whose
//! `action_map` records, for every compiled action, the source action and
//! the integer values bound while grounding it.

mod arrays;
mod count;
mod intparams;

pub use arrays::{flatten_arrays, fold_out_of_range};
pub use count::remove_counts;
pub use intparams::ground_int_params;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::eval::{Binding, EvalError};
use crate::model::{ModelError, Param, Problem};

/// Policy for array accesses outside the declared bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum UndefinednessMode {
    /// Any out-of-range access is a compilation error.
    #[default]
    Restrictive,
    /// Out-of-range accesses fold conditions to false and remove actions whose
    /// effects touch them.
    Permissive,
}

impl fmt::Display for UndefinednessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinednessMode::Restrictive => write!(f, "restrictive"),
            UndefinednessMode::Permissive => write!(f, "permissive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("undefined array access {access} in {context}")]
    UndefinedAccess { access: String, context: String },
    #[error("index of {access} is not a constant after simplification")]
    NonConstantIndex { access: String },
    #[error("compiled name `{0}` collides with an existing name")]
    NameCollision(String),
    #[error("action `{action}` has {combinations} integer parameter combinations, above the limit of {limit}")]
    DomainTooLarge {
        action: String,
        combinations: u128,
        limit: u128,
    },
    #[error("compiler order violated: {0}")]
    OrderViolation(String),
    #[error("Count argument `{0}` has free parameters")]
    CountNotClosed(String),
    #[error("nested Count in `{0}` is not supported")]
    NestedCount(String),
    #[error("action `{action}` assigns {target} more than once")]
    ConflictingEffects { action: String, target: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Where a compiled action came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionOrigin {
    /// Name of the action in the source problem.
    pub source: String,
    /// Values given to the source action's integer parameters.
    pub binding: Binding,
    /// Parameters of the source action, in declaration order.
    pub params: Vec<Param>,
}

/// Output of a compiler pass.
#[derive(Clone, Debug)]
pub struct CompilationResult {
    pub compiled: Problem,
    /// Compiled action name to its origin; injective and total over compiled actions.
    pub action_map: BTreeMap<String, ActionOrigin>,
    /// Human-readable notices (dropped actions, folded conditions).
    pub notes: Vec<String>,
}

impl CompilationResult {
    /// Result of a pass that changed nothing.
    pub fn identity(problem: &Problem) -> CompilationResult {
        CompilationResult {
            compiled: problem.clone(),
            action_map: identity_map(problem),
            notes: Vec::new(),
        }
    }

    pub fn origin(&self, compiled_action: &str) -> Option<&ActionOrigin> {
        self.action_map.get(compiled_action)
    }
}

pub(crate) fn identity_map(problem: &Problem) -> BTreeMap<String, ActionOrigin> {
    problem
        .actions()
        .iter()
        .map(|a| {
            (
                a.name.to_string(),
                ActionOrigin {
                    source: a.name.to_string(),
                    binding: Binding::new(),
                    params: a.params.clone(),
                },
            )
        })
        .collect()
}
