//! Validates hand-written plans against the high-level robot problem.

use planforge::compile::UndefinednessMode;
use planforge::domains::robot_grid;
use planforge::search::validate;
use planforge::Plan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = robot_grid(3)?;
    let plans = [
        "move_right(r=0, c=0)\nmove_right(r=0, c=1)\nmove_down(r=0, c=2)\nmove_down(r=1, c=2)\n",
        "move_right(r=0, c=0)\nmove_down(r=0, c=2)\n",
        "move_right(r=0, c=0)\n",
    ];
    for text in plans {
        let plan = Plan::parse_text(text)?;
        let report = validate(&problem, &plan, UndefinednessMode::Restrictive)?;
        println!("{}  ->  {report}", text.trim().replace('\n', "; "));
    }
    Ok(())
}
