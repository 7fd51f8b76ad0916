//! Builds a small problem with arrays, integer parameters and Count, writes
//! it as JSON and reads it back.

use planforge::format::{load_problem, save_problem};
use planforge::pipeline::{compile, Options};
use planforge::search::{solve, SearchConfig};
use planforge::{Action, Expr, Problem, Type, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut pb = Problem::builder("shelves");
    let shelf = pb.fluent("shelf", &[], Type::array(4, Type::int(0, 3)?)?)?;
    pb.set_default(&shelf, Value::filled(&[4], &Value::Int(0)))?;
    let mut stock = Action::builder("stock");
    let i = stock.int_param("i", 0, 3)?;
    let slot = shelf.cell(vec![i])?;
    stock.precondition(Expr::lt(slot.clone(), Expr::int(3))?)?;
    stock.effect(slot.clone(), Expr::plus(vec![slot, Expr::int(1)])?)?;
    pb.add_action(stock.build()?)?;
    let full: Vec<Expr> = (0..4)
        .map(|k| Expr::ge(shelf.at(&[k])?, Expr::int(2)))
        .collect::<Result<_, _>>()?;
    pb.add_goal(Expr::ge(Expr::count(full)?, Expr::int(3))?)?;
    let problem = pb.build()?;

    let text = save_problem(&problem);
    println!("{text}");
    let back = load_problem(&text)?;
    assert_eq!(save_problem(&back), text);

    let compiled = compile(&back, Options::default())?;
    let plan = solve(&compiled.problem, &SearchConfig::default())?.plan.ok_or("no plan")?;
    print!("{}", compiled.map_plan_back(&plan)?.to_text());
    Ok(())
}
