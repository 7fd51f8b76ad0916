//! Runs the compiler passes one at a time on the robot grid and shows how
//! `move_right` and the goal change after each pass.
//!
//!     cargo run --example robot_grid_pipeline -- 4

use planforge::domains::robot_grid;
use planforge::pipeline::{compile, Options};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let source = robot_grid(n)?;
    println!("== source ==\n{}", source.action("move_right").unwrap());
    let compiled = compile(&source, Options::default())?;
    for snap in &compiled.snapshots {
        let p = &snap.problem;
        println!("\n== after {} ==", snap.pass);
        println!("{} actions, {} fluents", p.actions().len(), p.fluents().len());
        if let Some(a) = p.action("move_right_0_1") {
            println!("{a}");
        }
        for g in p.goals() {
            println!("goal: {g}");
        }
    }
    let map = &compiled.action_map["move_right_0_1"];
    println!("\nmove_right_0_1 comes from {} with {:?}", map.source, map.binding);
    Ok(())
}
