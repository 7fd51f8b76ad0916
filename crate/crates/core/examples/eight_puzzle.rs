//! Solves a sliding-tile puzzle given as rows, e.g.
//!
//!     cargo run --release --example eight_puzzle -- "8 6 7/2 5 4/3 0 1"

use std::time::Instant;

use planforge::domains::gen_npuzzle;
use planforge::pipeline::{compile, Options};
use planforge::search::{solve, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let board = std::env::args().nth(1).unwrap_or_else(|| "8 6 7/2 5 4/3 0 1".into());
    let tiles: Vec<Vec<i64>> = board
        .split('/')
        .map(|row| row.split_whitespace().map(str::parse).collect())
        .collect::<Result<_, _>>()?;
    let started = Instant::now();
    let compiled = compile(&gen_npuzzle(tiles.len(), &tiles)?, Options::default())?;
    let outcome = solve(&compiled.problem, &SearchConfig::default())?;
    let plan = compiled.map_plan_back(&outcome.plan.ok_or("unsolvable")?)?;
    println!(
        "{} moves, {} states expanded, {:.2?}",
        plan.len(),
        outcome.expanded,
        started.elapsed()
    );
    print!("{}", plan.to_text());
    Ok(())
}
