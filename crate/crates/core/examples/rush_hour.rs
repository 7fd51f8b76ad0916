//! Rush Hour from a 36-character grid (row by row, `o` or `.` for empty
//! cells, `A` the red car). Compiled permissively so off-board moves drop out.
//!
//!     cargo run --release --example rush_hour -- GBBoLoGHIoLMGHIAAMCCCKoMooJKDDEEJFFo

use planforge::compile::UndefinednessMode;
use planforge::domains::{gen_rushhour, RushHourGrid};
use planforge::pipeline::{compile, Options};
use planforge::search::{solve, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "oooBoooooBooAAoBoooooooooooooooooCCo".into());
    let board = RushHourGrid::parse(&grid)?;
    for row in board.occupancy() {
        println!("{}", row.iter().map(|c| c.unwrap_or('.')).collect::<String>());
    }
    let options = Options {
        mode: UndefinednessMode::Permissive,
        force: false,
    };
    let compiled = compile(&gen_rushhour(&grid)?, options)?;
    println!(
        "{} vehicles, {} ground moves after compilation",
        board.vehicles.len(),
        compiled.problem.actions().len()
    );
    let plan = solve(&compiled.problem, &SearchConfig::default())?.plan.ok_or("no solution")?;
    let plan = compiled.map_plan_back(&plan)?;
    println!("solved in {} moves:", plan.len());
    print!("{}", plan.to_text());
    Ok(())
}
