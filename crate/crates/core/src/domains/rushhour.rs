use std::collections::BTreeMap;

use super::DomainError;
use crate::model::{Action, Expr, Fluent, Problem, Type, Value};

const SIZE: usize = 6;
const EXIT_ROW: usize = 2;

/// A vehicle as found in the grid string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vehicle {
    pub name: char,
    /// Occupied cells as (row, column), in reading order.
    pub cells: Vec<(usize, usize)>,
}

impl Vehicle {
    pub fn is_car(&self) -> bool {
        self.cells.len() == 2
    }

    pub fn is_horizontal(&self) -> bool {
        self.cells[0].0 == self.cells[1].0
    }
}

/// Parsed 6×6 board.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RushHourGrid {
    pub vehicles: Vec<Vehicle>,
    /// Empty-cell character seen in the input (`o` or `.`), if any.
    pub empty_char: Option<char>,
}

impl RushHourGrid {
    pub fn parse(grid: &str) -> Result<RushHourGrid, DomainError> {
        let chars: Vec<char> = grid.chars().collect();
        if chars.len() != SIZE * SIZE {
            return Err(DomainError::GridLength(chars.len()));
        }
        let mut empty_char = None;
        let mut cells: BTreeMap<char, Vec<(usize, usize)>> = BTreeMap::new();
        let mut order = Vec::new();
        for (i, &ch) in chars.iter().enumerate() {
            if ch == 'o' || ch == '.' {
                empty_char.get_or_insert(ch);
                continue;
            }
            if !ch.is_ascii_alphabetic() {
                return Err(DomainError::Parse(format!("unexpected character `{ch}` in grid")));
            }
            if !cells.contains_key(&ch) {
                order.push(ch);
            }
            cells.entry(ch).or_default().push((i / SIZE, i % SIZE));
        }
        let mut vehicles = Vec::new();
        for name in order {
            let cs = cells.remove(&name).unwrap();
            if cs.len() != 2 && cs.len() != 3 {
                return Err(DomainError::Multiplicity {
                    vehicle: name,
                    cells: cs.len(),
                });
            }
            let horizontal = cs.windows(2).all(|w| w[1] == (w[0].0, w[0].1 + 1));
            let vertical = cs.windows(2).all(|w| w[1] == (w[0].0 + 1, w[0].1));
            if !horizontal && !vertical {
                return Err(DomainError::BentVehicle(name));
            }
            vehicles.push(Vehicle { name, cells: cs });
        }
        match vehicles.iter().find(|v| v.name == 'A') {
            None => return Err(DomainError::NoRedCar),
            Some(a) if !a.is_horizontal() || a.cells[0].0 != EXIT_ROW => {
                return Err(DomainError::RedCarPlacement)
            }
            _ => {}
        }
        Ok(RushHourGrid {
            vehicles,
            empty_char,
        })
    }

    /// Vehicle occupying each cell, row-major.
    pub fn occupancy(&self) -> [[Option<char>; SIZE]; SIZE] {
        let mut out = [[None; SIZE]; SIZE];
        for v in &self.vehicles {
            for &(r, c) in &v.cells {
                out[r][c] = Some(v.name);
            }
        }
        out
    }
}

/// Extracts the 36-character board from a line of the form
/// `<moves> <grid> <cluster>` or a bare grid.
pub fn parse_rushhour_line(line: &str) -> Result<String, DomainError> {
    line.split_whitespace()
        .find(|tok| tok.chars().count() == SIZE * SIZE)
        .map(str::to_string)
        .ok_or_else(|| DomainError::Parse(format!("no 36-character grid in `{line}`")))
}

/// Rush Hour on a 6×6 board. Each vehicle is an object of type `Vehicle`
/// (plus `none` for empty cells); `occupied` holds the vehicle in each cell
/// and `is_car` separates cars from trucks.
///
/// Four move schemas (horizontal/vertical × car/truck) take the leftmost
/// (topmost) cell and a signed distance `m`. Out-of-board destinations are
/// left to permissive compilation, which drops them.
pub fn gen_rushhour(grid: &str) -> Result<Problem, DomainError> {
    let parsed = RushHourGrid::parse(grid)?;
    let mut pb = Problem::builder("rush_hour");
    let vehicle = pb.user_type("Vehicle")?;
    for v in &parsed.vehicles {
        pb.object(&v.name.to_string(), &vehicle)?;
    }
    let none = pb.object("none", &vehicle)?;
    let occupied = pb.fluent(
        "occupied",
        &[],
        Type::array_of(&[SIZE, SIZE], vehicle.clone())?,
    )?;
    let is_car = pb.fluent("is_car", &[("v", vehicle.clone())], Type::Bool)?;

    let occ = parsed.occupancy();
    let board = Value::Array(
        occ.iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Some(ch) => Value::object(&ch.to_string()),
                            None => Value::object("none"),
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    pb.set_initial_value(&occupied.get()?, board)?;
    for v in &parsed.vehicles {
        let obj = pb_object(&v.name.to_string(), &vehicle)?;
        pb.set_initial_value(&is_car.atom(vec![obj])?, v.is_car())?;
    }

    let schema = Schema {
        occupied: &occupied,
        is_car: &is_car,
        none: &none,
        vehicle: &vehicle,
    };
    for horizontal in [true, false] {
        for length in [2usize, 3] {
            pb.add_action(schema.mv(horizontal, length)?)?;
        }
    }

    let red = pb_object("A", &vehicle)?;
    pb.add_goal(Expr::equals(
        occupied.at(&[EXIT_ROW as i64, SIZE as i64 - 1])?,
        red,
    )?)?;
    Ok(pb.build()?)
}

fn pb_object(name: &str, ty: &Type) -> Result<Expr, DomainError> {
    Ok(Expr::object(name, ty)?)
}

struct Schema<'a> {
    occupied: &'a Fluent,
    is_car: &'a Fluent,
    none: &'a Expr,
    vehicle: &'a Type,
}

impl Schema<'_> {
    /// Move of a vehicle of `length` cells whose first cell is (r, c).
    fn mv(&self, horizontal: bool, length: usize) -> Result<Action, DomainError> {
        let name = format!(
            "move_{}_{}",
            if horizontal { "horizontal" } else { "vertical" },
            if length == 2 { "car" } else { "truck" }
        );
        let span = (SIZE - length) as i64;
        let last = SIZE as i64 - 1;
        let mut a = Action::builder(&name);
        let v = a.param("v", self.vehicle.clone())?;
        let (r, c) = if horizontal {
            (a.int_param("r", 0, last)?, a.int_param("c", 0, span)?)
        } else {
            (a.int_param("r", 0, span)?, a.int_param("c", 0, last)?)
        };
        let m = a.int_param("m", -span, span)?;

        // Cell `k` positions along the movement axis from (r, c).
        let along = |base: &Expr, k: Expr| -> Result<Expr, DomainError> {
            Ok(match k.as_int() {
                Some(0) => base.clone(),
                Some(n) if n < 0 => Expr::minus(base.clone(), Expr::int(-n))?,
                _ => Expr::plus(vec![base.clone(), k])?,
            })
        };
        let cell = |k: Expr| -> Result<Expr, DomainError> {
            Ok(if horizontal {
                self.occupied.cell(vec![r.clone(), along(&c, k)?])?
            } else {
                self.occupied.cell(vec![along(&r, k)?, c.clone()])?
            })
        };
        let shifted = |k: i64| -> Result<Expr, DomainError> {
            cell(Expr::plus(vec![Expr::int(k), m.clone()])?)
        };

        a.precondition(Expr::not(Expr::equals(v.clone(), self.none.clone())?)?)?;
        let car = self.is_car.atom(vec![v.clone()])?;
        a.precondition(if length == 2 { car } else { Expr::not(car)? })?;
        for k in 0..length as i64 {
            a.precondition(Expr::equals(cell(Expr::int(k))?, v.clone())?)?;
        }
        a.precondition(Expr::not(Expr::equals(m.clone(), Expr::int(0))?)?)?;
        // Cells swept forwards and backwards must be empty.
        for k in 1..=span {
            let ahead = cell(Expr::int(length as i64 - 1 + k))?;
            a.precondition(Expr::or(vec![
                Expr::lt(m.clone(), Expr::int(k))?,
                Expr::equals(ahead, self.none.clone())?,
            ])?)?;
            let behind = cell(Expr::int(-k))?;
            a.precondition(Expr::or(vec![
                Expr::gt(m.clone(), Expr::int(-k))?,
                Expr::equals(behind, self.none.clone())?,
            ])?)?;
        }

        for k in 0..length as i64 {
            a.effect(shifted(k)?, v.clone())?;
        }
        // An old cell is vacated unless the vehicle still covers it.
        for k in 0..length as i64 {
            let covered: Vec<Expr> = (0..length as i64)
                .map(|j| k - j)
                .filter(|&d| d != 0)
                .map(|d| Expr::not(Expr::equals(m.clone(), Expr::int(d))?))
                .collect::<Result<_, _>>()?;
            a.conditional_effect(Expr::and(covered)?, cell(Expr::int(k))?, self.none.clone())?;
        }
        Ok(a.build()?)
    }
}
