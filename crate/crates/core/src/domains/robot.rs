use super::DomainError;
use crate::model::{Action, Expr, Fluent, Problem, Type, Value};

/// Robot on an `n`×`n` Boolean grid starting at (0, 0), with one move action
/// per direction over integer row/column parameters.
///
/// Goals: the robot is in the opposite corner and exactly one cell is
/// occupied, the latter as a Count over all cells.
pub fn robot_grid(n: usize) -> Result<Problem, DomainError> {
    let mut pb = Problem::builder(&format!("robot_{n}x{n}"));
    let grid = Type::array_of(&[n, n], Type::Bool)?;
    let at_robot = pb.fluent("at_robot", &[], grid)?;
    pb.set_default(&at_robot, Value::filled(&[n, n], &Value::Bool(false)))?;
    pb.set_initial_value(&at_robot.at(&[0, 0])?, true)?;

    let last = n as i64 - 1;
    // (name, row range, column range, row delta, column delta)
    let moves = [
        ("move_right", (0, last), (0, last - 1), 0, 1),
        ("move_left", (0, last), (1, last), 0, -1),
        ("move_up", (1, last), (0, last), -1, 0),
        ("move_down", (0, last - 1), (0, last), 1, 0),
    ];
    for (name, rows, cols, dr, dc) in moves {
        pb.add_action(move_action(&at_robot, name, rows, cols, dr, dc)?)?;
    }

    pb.add_goal(at_robot.at(&[last, last])?)?;
    let mut cells = Vec::new();
    for r in 0..n as i64 {
        for c in 0..n as i64 {
            cells.push(at_robot.at(&[r, c])?);
        }
    }
    pb.add_goal(Expr::equals(Expr::count(cells)?, Expr::int(1))?)?;
    Ok(pb.build()?)
}

fn shifted(e: &Expr, delta: i64) -> Result<Expr, DomainError> {
    Ok(match delta {
        0 => e.clone(),
        d if d > 0 => Expr::plus(vec![e.clone(), Expr::int(d)])?,
        d => Expr::minus(e.clone(), Expr::int(-d))?,
    })
}

fn move_action(
    at_robot: &Fluent,
    name: &str,
    rows: (i64, i64),
    cols: (i64, i64),
    dr: i64,
    dc: i64,
) -> Result<Action, DomainError> {
    let mut a = Action::builder(name);
    let r = a.int_param("r", rows.0, rows.1)?;
    let c = a.int_param("c", cols.0, cols.1)?;
    let from = at_robot.cell(vec![r.clone(), c.clone()])?;
    let to = at_robot.cell(vec![shifted(&r, dr)?, shifted(&c, dc)?])?;
    a.precondition(from.clone())?;
    a.effect(to, Expr::bool(true))?;
    a.effect(from, Expr::bool(false))?;
    Ok(a.build()?)
}
