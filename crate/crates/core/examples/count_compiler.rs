//! Count expressions become counter fluents. Each action that can change a
//! counted argument gets effects keeping its counter up to date.

use planforge::compile::remove_counts;
use planforge::{Action, Expr, Problem, Type};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut pb = Problem::builder("lamps");
    let lamps: Vec<_> = (0..3)
        .map(|i| pb.fluent(&format!("lamp{i}"), &[], Type::Bool))
        .collect::<Result<_, _>>()?;
    let power = pb.fluent("power", &[], Type::Bool)?;
    pb.set_initial_value(&power.get()?, true)?;
    let on: Vec<Expr> = lamps.iter().map(|l| l.get()).collect::<Result<_, _>>()?;
    pb.add_goal(Expr::equals(Expr::count(on.clone())?, Expr::int(2))?)?;
    for (i, lamp) in on.iter().enumerate() {
        let mut a = Action::builder(&format!("toggle{i}"));
        a.effect(lamp.clone(), Expr::not(lamp.clone())?)?;
        pb.add_action(a.build()?)?;
    }
    // A conditional write: the counter update is split on the condition.
    let mut a = Action::builder("surge");
    a.conditional_effect(power.get()?, on[0].clone(), Expr::bool(true))?;
    pb.add_action(a.build()?)?;
    let problem = pb.build()?;

    let result = remove_counts(&problem)?;
    let p = &result.compiled;
    println!("goal: {}", p.goals()[0]);
    for init in p.init() {
        println!("init: {init}");
    }
    for name in ["toggle0", "surge"] {
        println!("{}", p.action(name).unwrap());
    }
    Ok(())
}
