//! Out-of-range array accesses: how expressions fold and simplify, and how
//! the two compilation modes treat an action that can step off the grid.

use planforge::compile::{fold_out_of_range, UndefinednessMode};
use planforge::domains::gen_rushhour;
use planforge::eval::simplify;
use planforge::pipeline::{compile, Options};
use planforge::{Expr, Fluent, Type};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let my_ints = Fluent::new("my_ints", vec![], Type::array(3, Type::int(0, 9)?)?);
    let e = Expr::or(vec![
        Expr::equals(Expr::plus(vec![my_ints.at(&[3])?, Expr::int(2)])?, Expr::int(2))?,
        Expr::equals(my_ints.at(&[2])?, Expr::int(0))?,
    ])?;
    let folded = fold_out_of_range(&e)?;
    println!("{e}\n  folds to   {folded}\n  simplifies to {}", simplify(&folded));

    // Rush Hour moves are generated for every distance, so some of them
    // write outside the board.
    let problem = gen_rushhour("oooBoooooBooAAoBoooooooooooooooooCCo")?;
    match compile(&problem, Options { mode: UndefinednessMode::Restrictive, force: false }) {
        Ok(_) => println!("restrictive: compiled"),
        Err(e) => println!("restrictive: {e}"),
    }
    let c = compile(&problem, Options { mode: UndefinednessMode::Permissive, force: false })?;
    let notes: Vec<&str> = c.notes().collect();
    println!("permissive: {} actions kept, {} notes, e.g.", c.problem.actions().len(), notes.len());
    for n in notes.iter().take(3) {
        println!("  {n}");
    }
    Ok(())
}
