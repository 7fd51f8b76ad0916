use super::DomainError;
use crate::model::{Action, Expr, Fluent, Problem, Type, Value};

/// Sliding-tile puzzle on a `k`×`k` board; `0` is the blank.
///
/// Each slide action moves the tile at `(r, c)` into the adjacent blank.
/// The goal is tiles `1..k²-1` in row-major order followed by the blank.
/// Unsolvable permutations are rejected.
pub fn gen_npuzzle(k: usize, tiles: &[Vec<i64>]) -> Result<Problem, DomainError> {
    if k < 2 {
        return Err(DomainError::PuzzleSize(k));
    }
    check_shape(k, tiles)?;
    let n = (k * k) as i64;
    let flat: Vec<i64> = tiles.iter().flatten().copied().collect();
    let mut sorted = flat.clone();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(DomainError::NotPermutation(k * k - 1));
    }
    if !is_solvable(k, &flat) {
        return Err(DomainError::Unsolvable);
    }

    let mut pb = Problem::builder(&format!("puzzle_{k}x{k}"));
    let cell = Type::int(0, n - 1)?;
    let puzzle = pb.fluent("puzzle", &[], Type::array_of(&[k, k], cell.clone())?)?;
    let board = Value::Array(
        tiles
            .iter()
            .map(|row| Value::Array(row.iter().map(|&t| Value::Int(t)).collect()))
            .collect(),
    );
    pb.set_initial_value(&puzzle.get()?, board)?;

    let last = k as i64 - 1;
    // (name, row range, column range, offset of the blank)
    let slides = [
        ("slide_up", (1, last), (0, last), (-1, 0)),
        ("slide_down", (0, last - 1), (0, last), (1, 0)),
        ("slide_left", (0, last), (1, last), (0, -1)),
        ("slide_right", (0, last), (0, last - 1), (0, 1)),
    ];
    for (name, rows, cols, delta) in slides {
        pb.add_action(slide(&puzzle, name, rows, cols, delta)?)?;
    }

    let goal: Vec<Value> = (0..k)
        .map(|r| {
            Value::Array(
                (0..k)
                    .map(|c| {
                        let i = (r * k + c) as i64 + 1;
                        Value::Int(if i == n { 0 } else { i })
                    })
                    .collect(),
            )
        })
        .collect();
    let target = Expr::constant(&Value::Array(goal), &Type::array_of(&[k, k], cell)?)?;
    pb.add_goal(Expr::equals(puzzle.get()?, target)?)?;
    Ok(pb.build()?)
}

fn check_shape(k: usize, tiles: &[Vec<i64>]) -> Result<(), DomainError> {
    if tiles.len() != k || tiles.iter().any(|row| row.len() != k) {
        let widths: Vec<String> = tiles.iter().map(|r| r.len().to_string()).collect();
        return Err(DomainError::Shape {
            expected: format!("{k}x{k}"),
            got: format!("{} rows of widths [{}]", tiles.len(), widths.join(", ")),
        });
    }
    Ok(())
}

fn offset(e: &Expr, d: i64) -> Result<Expr, DomainError> {
    Ok(match d {
        0 => e.clone(),
        d if d > 0 => Expr::plus(vec![e.clone(), Expr::int(d)])?,
        d => Expr::minus(e.clone(), Expr::int(-d))?,
    })
}

fn slide(
    puzzle: &Fluent,
    name: &str,
    rows: (i64, i64),
    cols: (i64, i64),
    (dr, dc): (i64, i64),
) -> Result<Action, DomainError> {
    let mut a = Action::builder(name);
    let r = a.int_param("r", rows.0, rows.1)?;
    let c = a.int_param("c", cols.0, cols.1)?;
    let tile = puzzle.cell(vec![r.clone(), c.clone()])?;
    let blank = puzzle.cell(vec![offset(&r, dr)?, offset(&c, dc)?])?;
    a.precondition(Expr::equals(blank.clone(), Expr::int(0))?)?;
    a.effect(blank, tile.clone())?;
    a.effect(tile, Expr::int(0))?;
    Ok(a.build()?)
}

/// Whether the row-major board `flat` (0 = blank) can reach the ordered goal.
pub fn is_solvable(k: usize, flat: &[i64]) -> bool {
    let tiles: Vec<i64> = flat.iter().copied().filter(|&t| t != 0).collect();
    let mut inversions = 0usize;
    for i in 0..tiles.len() {
        for j in i + 1..tiles.len() {
            if tiles[i] > tiles[j] {
                inversions += 1;
            }
        }
    }
    if k % 2 == 1 {
        inversions.is_multiple_of(2)
    } else {
        let blank_row = flat.iter().position(|&t| t == 0).unwrap_or(0) / k;
        let from_bottom = k - blank_row;
        (inversions + from_bottom) % 2 == 1
    }
}

/// Parses a board given as a JSON integer matrix.
pub fn parse_puzzle(text: &str) -> Result<Vec<Vec<i64>>, DomainError> {
    serde_json::from_str(text).map_err(|e| DomainError::Parse(e.to_string()))
}
