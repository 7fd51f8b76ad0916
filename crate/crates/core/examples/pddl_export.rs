//! Compiles the robot grid and writes PDDL files into a directory (default:
//! a fresh temporary one), after checking them with the built-in linter.
//!
//!     cargo run --example pddl_export -- out/

use std::path::PathBuf;

use planforge::domains::robot_grid;
use planforge::pddl::{export, lint};
use planforge::pipeline::{compile, Options};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("planforge_pddl"));
    let compiled = compile(&robot_grid(3)?, Options::default())?;
    let files = export(&compiled.problem)?;
    let summary = lint(&files.domain, &files.problem)?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("domain.pddl"), &files.domain)?;
    std::fs::write(dir.join("problem.pddl"), &files.problem)?;
    println!(
        "wrote {} ({} predicates, {} functions, {} actions)",
        dir.display(),
        summary.predicates.len(),
        summary.functions.len(),
        summary.actions.len()
    );
    println!("{}", files.problem);
    Ok(())
}
