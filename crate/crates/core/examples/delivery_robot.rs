//! A classical problem built with the API: a robot carries a package across
//! a 2×2 grid. No compilation is needed, so it goes straight to the planner.

use planforge::domains::delivery;
use planforge::pipeline::FeatureSet;
use planforge::search::{solve, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = delivery()?;
    println!("high-level features: {}", FeatureSet::of(&problem));
    for action in problem.actions() {
        println!("{action}");
    }
    let outcome = solve(&problem, &SearchConfig::default())?;
    let plan = outcome.plan.ok_or("no plan")?;
    println!("\nplan ({} steps, {} states expanded):", plan.len(), outcome.expanded);
    print!("{}", plan.to_text());
    Ok(())
}
