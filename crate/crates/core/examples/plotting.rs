//! The Plotting puzzle: shoot blocks into rows and columns until at most
//! `max_remaining` blocks are left. Uses A* on the 5×5 board.

use planforge::domains::gen_plotting;
use planforge::pipeline::{compile, Options};
use planforge::search::{solve, SearchConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = [
        vec!["R", "R", "B", "G", "Y"],
        vec!["R", "B", "Y", "Y", "Y"],
        vec!["B", "G", "B", "G", "B"],
        vec!["G", "Y", "G", "R", "B"],
        vec!["Y", "G", "R", "R", "B"],
    ];
    let problem = gen_plotting(5, 5, &["R", "B", "G", "Y"], &grid, 4)?;
    let compiled = compile(&problem, Options::default())?;
    println!("{} ground actions", compiled.problem.actions().len());
    let config = SearchConfig {
        strategy: Strategy::AStar,
        ..SearchConfig::default()
    };
    let outcome = solve(&compiled.problem, &config)?;
    let plan = compiled.map_plan_back(&outcome.plan.ok_or("no plan")?)?;
    println!("{} shots ({} states expanded):", plan.len(), outcome.expanded);
    print!("{}", plan.to_text());
    Ok(())
}
