//! Generators for the benchmark domains, each producing a high-level
//! [`Problem`](crate::model::Problem).

mod delivery;
mod npuzzle;
mod plotting;
mod robot;
mod rushhour;

pub use delivery::delivery;
pub use npuzzle::{gen_npuzzle, is_solvable, parse_puzzle};
pub use plotting::{gen_plotting, parse_plotting, PlottingSpec};
pub use robot::robot_grid;
pub use rushhour::{gen_rushhour, parse_rushhour_line, RushHourGrid, Vehicle};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("grid has shape {got}, expected {expected}")]
    Shape { expected: String, got: String },
    #[error("unknown colour `{0}`")]
    UnknownColour(String),
    #[error("max_remaining must be non-negative, got {0}")]
    NegativeBound(i64),
    #[error("Rush Hour grid must have 36 cells, got {0}")]
    GridLength(usize),
    #[error("vehicle `{0}` does not occupy a straight line of adjacent cells")]
    BentVehicle(char),
    #[error("vehicle `{vehicle}` occupies {cells} cells; cars take 2 and trucks 3")]
    Multiplicity { vehicle: char, cells: usize },
    #[error("Rush Hour grid has no red car `A`")]
    NoRedCar,
    #[error("red car `A` must be horizontal on the exit row")]
    RedCarPlacement,
    #[error("tiles are not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("puzzle configuration is unsolvable (wrong inversion parity)")]
    Unsolvable,
    #[error("puzzle size must be at least 2, got {0}")]
    PuzzleSize(usize),
    #[error("cannot parse instance: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
