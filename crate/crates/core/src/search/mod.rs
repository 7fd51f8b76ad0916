//! Reference planner for compiled (classical) problems and a plan validator
//! for problems at any level.

mod ground;
mod validate;

pub use ground::{GroundAction, GroundTask, Packed};
pub use validate::{validate, Failure, ValidateError, ValidationReport};

use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::eval::EvalError;
use crate::model::{ModelError, Plan, PlanStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("problem still uses high-level features ({0}); compile it first")]
    HighLevel(String),
    #[error("cannot lower problem: {0}")]
    Lowering(String),
    #[error("search limit reached: {reason} after {expanded} expansions")]
    LimitExhausted { reason: Limit, expanded: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Nodes,
    Time,
}

impl std::fmt::Display for Limit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Limit::Nodes => "node limit",
            Limit::Time => "time limit",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Breadth-first search; plans are optimal in length.
    #[default]
    Bfs,
    /// A* with the number of unsatisfied goal conjuncts as heuristic.
    AStar,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub max_nodes: Option<usize>,
    pub timeout: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// `None` when the reachable state space holds no goal state.
    pub plan: Option<Plan>,
    pub expanded: usize,
    pub generated: usize,
}

/// Lowers `problem` and searches for a plan.
pub fn solve(problem: &crate::model::Problem, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let task = GroundTask::new(problem)?;
    search(&task, config)
}

pub fn search(task: &GroundTask, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    let mut states: Vec<Packed> = vec![task.initial().clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut index: HashMap<Packed, usize> = HashMap::new();
    index.insert(task.initial().clone(), 0);
    let mut expanded = 0usize;

    let mut fifo = VecDeque::new();
    let mut heap = BinaryHeap::new();
    let mut g_cost = vec![0usize];
    match config.strategy {
        Strategy::Bfs => fifo.push_back(0usize),
        Strategy::AStar => heap.push(Reverse((task.goal_distance(task.initial()), 0usize, 0usize))),
    }

    loop {
        let current = match config.strategy {
            Strategy::Bfs => fifo.pop_front(),
            Strategy::AStar => heap.pop().map(|Reverse((_, g, i))| {
                if g > g_cost[i] {
                    usize::MAX
                } else {
                    i
                }
            }),
        };
        let Some(current) = current else {
            return Ok(SearchOutcome {
                plan: None,
                expanded,
                generated: states.len(),
            });
        };
        if current == usize::MAX {
            continue;
        }
        if task.is_goal(&states[current]) {
            return Ok(SearchOutcome {
                plan: Some(extract(task, &parent, current)),
                expanded,
                generated: states.len(),
            });
        }
        if config.max_nodes.is_some_and(|m| expanded >= m) {
            return Err(SearchError::LimitExhausted {
                reason: Limit::Nodes,
                expanded,
            });
        }
        if expanded.is_multiple_of(256) && config.timeout.is_some_and(|t| started.elapsed() >= t) {
            return Err(SearchError::LimitExhausted {
                reason: Limit::Time,
                expanded,
            });
        }
        expanded += 1;
        let g = g_cost[current] + 1;
        let succ: Vec<(usize, Packed)> = task.successors(&states[current]).collect();
        for (action, next) in succ {
            match index.entry(next) {
                Entry::Occupied(e) => {
                    let id = *e.get();
                    if config.strategy == Strategy::AStar && g < g_cost[id] {
                        g_cost[id] = g;
                        parent[id] = Some((current, action));
                        heap.push(Reverse((g + task.goal_distance(&states[id]), g, id)));
                    }
                }
                Entry::Vacant(e) => {
                    let id = states.len();
                    states.push(e.key().clone());
                    e.insert(id);
                    parent.push(Some((current, action)));
                    g_cost.push(g);
                    match config.strategy {
                        Strategy::Bfs => fifo.push_back(id),
                        Strategy::AStar => {
                            heap.push(Reverse((g + task.goal_distance(&states[id]), g, id)))
                        }
                    }
                }
            }
        }
    }
}

fn extract(task: &GroundTask, parent: &[Option<(usize, usize)>], mut at: usize) -> Plan {
    let mut steps = Vec::new();
    while let Some((prev, action)) = parent[at] {
        let a = &task.actions[action];
        let mut step = PlanStep::new(&a.name);
        step.args = a.args.clone();
        steps.push(step);
        at = prev;
    }
    steps.reverse();
    Plan::new(steps)
}
