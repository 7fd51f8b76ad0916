use super::DomainError;
use crate::model::{Action, Expr, Problem, Type};

/// Delivery robot on a 2×2 grid of positions P00, P01, P10, P11.
///
/// The robot starts at P00, the package at P10, and the goal is the package
/// at P11. `Move` has no adjacency requirement.
pub fn delivery() -> Result<Problem, DomainError> {
    let mut pb = Problem::builder("delivery");
    let pos = pb.user_type("Position")?;
    let mut p = Vec::new();
    for name in ["P00", "P01", "P10", "P11"] {
        p.push(pb.object(name, &pos)?);
    }
    let at_robot = pb.fluent("at_robot", &[("p", pos.clone())], Type::Bool)?;
    let at_package = pb.fluent("at_package", &[("p", pos.clone())], Type::Bool)?;
    let holding = pb.fluent("holding_package", &[], Type::Bool)?;

    let mut mv = Action::builder("Move");
    let p1 = mv.param("p1", pos.clone())?;
    let p2 = mv.param("p2", pos.clone())?;
    mv.precondition(at_robot.atom(vec![p1.clone()])?)?;
    mv.effect(at_robot.atom(vec![p2])?, Expr::bool(true))?;
    mv.effect(at_robot.atom(vec![p1])?, Expr::bool(false))?;
    pb.add_action(mv.build()?)?;

    let mut pick = Action::builder("PickUp");
    let x = pick.param("p", pos.clone())?;
    pick.precondition(at_robot.atom(vec![x.clone()])?)?;
    pick.precondition(at_package.atom(vec![x.clone()])?)?;
    pick.effect(holding.get()?, Expr::bool(true))?;
    pick.effect(at_package.atom(vec![x])?, Expr::bool(false))?;
    pb.add_action(pick.build()?)?;

    let mut drop = Action::builder("DropOff");
    let x = drop.param("p", pos)?;
    drop.precondition(at_robot.atom(vec![x.clone()])?)?;
    drop.precondition(holding.get()?)?;
    drop.effect(at_package.atom(vec![x])?, Expr::bool(true))?;
    drop.effect(holding.get()?, Expr::bool(false))?;
    pb.add_action(drop.build()?)?;

    pb.set_initial_value(&at_robot.atom(vec![p[0].clone()])?, true)?;
    pb.set_initial_value(&at_package.atom(vec![p[2].clone()])?, true)?;
    pb.add_goal(at_package.atom(vec![p[3].clone()])?)?;
    Ok(pb.build()?)
}
