use serde::Deserialize;

use super::DomainError;
use crate::model::{Action, ActionBuilder, Expr, Fluent, Problem, Type, Value};

/// Plotting instance as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PlottingSpec {
    /// Colour names; defaults to the colours occurring in the grid.
    #[serde(default)]
    pub colours: Vec<String>,
    /// Rows of colour names, top row first; `N` marks an empty cell.
    pub grid: Vec<Vec<String>>,
    pub max_remaining: i64,
}

pub fn parse_plotting(text: &str) -> Result<PlottingSpec, DomainError> {
    serde_json::from_str(text).map_err(|e| DomainError::Parse(e.to_string()))
}

/// Plotting puzzle: shoot the held block along a row (from the left) or a
/// column (from the top), clearing the run of blocks of its colour; the
/// first different block is caught and the shot block takes its place.
/// Blocks above cleared cells fall down.
///
/// Objects `W` (wildcard, the initial hand) and `N` (no block) are added to
/// the colours. The goal is at most `max_remaining` non-empty cells.
///
/// The full-row and column actions mirror `shoot_partial_row`; column shots
/// need no gravity since everything above the run is already cleared.
pub fn gen_plotting(
    rows: usize,
    columns: usize,
    colours: &[&str],
    grid: &[Vec<&str>],
    max_remaining: i64,
) -> Result<Problem, DomainError> {
    if rows < 2 || columns < 2 || grid.len() != rows || grid.iter().any(|r| r.len() != columns) {
        return Err(DomainError::Shape {
            expected: format!("{rows}x{columns} with at least 2 rows and 2 columns"),
            got: format!(
                "{} rows of widths {:?}",
                grid.len(),
                grid.iter().map(Vec::len).collect::<Vec<_>>()
            ),
        });
    }
    if max_remaining < 0 {
        return Err(DomainError::NegativeBound(max_remaining));
    }
    for cell in grid.iter().flatten() {
        if *cell != "N" && !colours.contains(cell) {
            return Err(DomainError::UnknownColour(cell.to_string()));
        }
    }
    if let Some(bad) = colours.iter().find(|c| **c == "W" || **c == "N") {
        return Err(DomainError::UnknownColour(format!("{bad} is reserved")));
    }

    let mut pb = Problem::builder(&format!("plotting_{rows}x{columns}"));
    let colour = pb.user_type("Colour")?;
    for c in colours {
        pb.object(c, &colour)?;
    }
    let w = pb.object("W", &colour)?;
    let n = pb.object("N", &colour)?;
    let blocks = pb.fluent(
        "blocks",
        &[],
        Type::array_of(&[rows, columns], colour.clone())?,
    )?;
    let hand = pb.fluent("hand", &[], colour.clone())?;
    let initial = Value::Array(
        grid.iter()
            .map(|row| Value::Array(row.iter().map(|c| Value::object(c)).collect()))
            .collect(),
    );
    pb.set_initial_value(&blocks.get()?, initial)?;
    pb.set_initial_value(&hand.get()?, Value::object("W"))?;

    let g = Game {
        rows: rows as i64,
        columns: columns as i64,
        blocks,
        hand: hand.get()?,
        w,
        n,
        colour,
    };
    pb.add_action(g.partial_row()?)?;
    pb.add_action(g.full_row()?)?;
    pb.add_action(g.partial_column()?)?;
    pb.add_action(g.full_column()?)?;

    let mut remaining = Vec::new();
    for i in 0..g.rows {
        for j in 0..g.columns {
            remaining.push(Expr::not(Expr::equals(g.cell(i, j)?, g.n.clone())?)?);
        }
    }
    pb.add_goal(Expr::le(Expr::count(remaining)?, Expr::int(max_remaining))?)?;
    Ok(pb.build()?)
}

struct Game {
    rows: i64,
    columns: i64,
    blocks: Fluent,
    hand: Expr,
    w: Expr,
    n: Expr,
    colour: Type,
}

impl Game {
    fn cell(&self, r: i64, c: i64) -> Result<Expr, DomainError> {
        Ok(self.blocks.at(&[r, c])?)
    }

    fn at(&self, r: &Expr, c: &Expr) -> Result<Expr, DomainError> {
        Ok(self.blocks.cell(vec![r.clone(), c.clone()])?)
    }

    fn eq(a: &Expr, b: &Expr) -> Result<Expr, DomainError> {
        Ok(Expr::equals(a.clone(), b.clone())?)
    }

    /// `p` is a real colour and the hand holds `p` or the wildcard.
    fn shot_preconditions(&self, a: &mut ActionBuilder, p: &Expr) -> Result<(), DomainError> {
        a.precondition(Expr::not(Expr::or(vec![
            Self::eq(p, &self.w)?,
            Self::eq(p, &self.n)?,
        ])?)?)?;
        a.precondition(Expr::or(vec![
            Self::eq(&self.hand, p)?,
            Self::eq(&self.hand, &self.w)?,
        ])?)?;
        Ok(())
    }

    /// The stopping block is neither `p` nor empty.
    fn stops_at(&self, a: &mut ActionBuilder, cell: Expr, p: &Expr) -> Result<(), DomainError> {
        a.precondition(Expr::not(Expr::or(vec![
            Self::eq(&cell, p)?,
            Self::eq(&cell, &self.n)?,
        ])?)?)?;
        Ok(())
    }

    fn plus_one(e: &Expr) -> Result<Expr, DomainError> {
        Ok(Expr::plus(vec![e.clone(), Expr::int(1)])?)
    }

    fn partial_row(&self) -> Result<Action, DomainError> {
        let mut a = Action::builder("shoot_partial_row");
        let p = a.param("p", self.colour.clone())?;
        let r = a.int_param("r", 0, self.rows - 1)?;
        let l = a.int_param("l", 0, self.columns - 2)?;
        self.shot_preconditions(&mut a, &p)?;
        let next = self.at(&r, &Self::plus_one(&l)?)?;
        self.stops_at(&mut a, next.clone(), &p)?;
        let mut some_p = Vec::new();
        for c in 0..self.columns - 1 {
            let cell = self.at(&r, &Expr::int(c))?;
            a.precondition(Expr::or(vec![
                Expr::gt(Expr::int(c), l.clone())?,
                Self::eq(&cell, &p)?,
                Self::eq(&cell, &self.n)?,
            ])?)?;
            some_p.push(Expr::and(vec![
                Self::eq(&cell, &p)?,
                Expr::le(Expr::int(c), l.clone())?,
            ])?);
        }
        a.precondition(Expr::or(some_p)?)?;
        a.effect(self.hand.clone(), next.clone())?;
        a.effect(next, p.clone())?;
        for c in 0..self.columns - 1 {
            let in_run = Expr::le(Expr::int(c), l.clone())?;
            a.conditional_effect(in_run.clone(), self.cell(0, c)?, self.n.clone())?;
            for row in 1..self.rows {
                let cond = Expr::and(vec![in_run.clone(), Expr::le(Expr::int(row), r.clone())?])?;
                a.conditional_effect(cond, self.cell(row, c)?, self.cell(row - 1, c)?)?;
            }
        }
        Ok(a.build()?)
    }

    fn full_row(&self) -> Result<Action, DomainError> {
        let mut a = Action::builder("shoot_full_row");
        let p = a.param("p", self.colour.clone())?;
        let r = a.int_param("r", 0, self.rows - 1)?;
        self.shot_preconditions(&mut a, &p)?;
        let mut some_p = Vec::new();
        for c in 0..self.columns {
            let cell = self.at(&r, &Expr::int(c))?;
            a.precondition(Expr::or(vec![Self::eq(&cell, &p)?, Self::eq(&cell, &self.n)?])?)?;
            some_p.push(Self::eq(&cell, &p)?);
        }
        a.precondition(Expr::or(some_p)?)?;
        a.effect(self.hand.clone(), p.clone())?;
        for c in 0..self.columns {
            a.effect(self.cell(0, c)?, self.n.clone())?;
            for row in 1..self.rows {
                let cond = Expr::le(Expr::int(row), r.clone())?;
                a.conditional_effect(cond, self.cell(row, c)?, self.cell(row - 1, c)?)?;
            }
        }
        Ok(a.build()?)
    }

    fn partial_column(&self) -> Result<Action, DomainError> {
        let mut a = Action::builder("shoot_partial_column");
        let p = a.param("p", self.colour.clone())?;
        let c = a.int_param("c", 0, self.columns - 1)?;
        let l = a.int_param("l", 0, self.rows - 2)?;
        self.shot_preconditions(&mut a, &p)?;
        let next = self.at(&Self::plus_one(&l)?, &c)?;
        self.stops_at(&mut a, next.clone(), &p)?;
        let mut some_p = Vec::new();
        for row in 0..self.rows - 1 {
            let cell = self.at(&Expr::int(row), &c)?;
            a.precondition(Expr::or(vec![
                Expr::gt(Expr::int(row), l.clone())?,
                Self::eq(&cell, &p)?,
                Self::eq(&cell, &self.n)?,
            ])?)?;
            some_p.push(Expr::and(vec![
                Self::eq(&cell, &p)?,
                Expr::le(Expr::int(row), l.clone())?,
            ])?);
        }
        a.precondition(Expr::or(some_p)?)?;
        a.effect(self.hand.clone(), next.clone())?;
        a.effect(next, p.clone())?;
        for row in 0..self.rows - 1 {
            let cell = self.at(&Expr::int(row), &c)?;
            a.conditional_effect(Expr::le(Expr::int(row), l.clone())?, cell, self.n.clone())?;
        }
        Ok(a.build()?)
    }

    fn full_column(&self) -> Result<Action, DomainError> {
        let mut a = Action::builder("shoot_full_column");
        let p = a.param("p", self.colour.clone())?;
        let c = a.int_param("c", 0, self.columns - 1)?;
        self.shot_preconditions(&mut a, &p)?;
        let mut some_p = Vec::new();
        for row in 0..self.rows {
            let cell = self.at(&Expr::int(row), &c)?;
            a.precondition(Expr::or(vec![Self::eq(&cell, &p)?, Self::eq(&cell, &self.n)?])?)?;
            some_p.push(Self::eq(&cell, &p)?);
        }
        a.precondition(Expr::or(some_p)?)?;
        a.effect(self.hand.clone(), p)?;
        for row in 0..self.rows {
            a.effect(self.at(&Expr::int(row), &c)?, self.n.clone())?;
        }
        Ok(a.build()?)
    }
}
