//! Shared fixtures and hand-written reference solvers. The solvers model each
//! game directly, without going through planforge, so they can serve as
//! oracles for the compiled problems.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;
use std::path::PathBuf;

use planforge::compile::UndefinednessMode;
use planforge::domains::{gen_npuzzle, gen_rushhour, parse_puzzle};
use planforge::format::load_problem;
use planforge::search::{GroundTask, Packed};
use planforge::Problem;

pub const RUSH_HOUR_BENCHMARK: &str = "GBBoLoGHIoLMGHIAAMCCCKoMooJKDDEEJFFo";

pub fn instance_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

/// Every bundled instance as (label, high-level problem, undefinedness mode).
pub fn bundled() -> Vec<(String, Problem, UndefinednessMode)> {
    let mut out = Vec::new();
    for file in ["robot_3x3.json", "delivery.json", "plotting_3x3.json", "plotting_5x5.json"] {
        let text = std::fs::read_to_string(instance_path(file)).unwrap();
        let p = load_problem(&text).unwrap_or_else(|e| panic!("{file}: {e}"));
        out.push((file.to_string(), p, UndefinednessMode::Restrictive));
    }
    for file in ["npuzzle_hardest_a.json", "npuzzle_hardest_b.json"] {
        let text = std::fs::read_to_string(instance_path(file)).unwrap();
        let tiles = parse_puzzle(&text).unwrap();
        out.push((file.to_string(), gen_npuzzle(tiles.len(), &tiles).unwrap(), UndefinednessMode::Restrictive));
    }
    let lines = std::fs::read_to_string(instance_path("rushhour.txt")).unwrap();
    for (i, line) in lines.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        out.push((
            format!("rushhour.txt:{}", i + 1),
            gen_rushhour(line.trim()).unwrap(),
            UndefinednessMode::Permissive,
        ));
    }
    out
}

/// Distances from `start` to every reachable state.
pub fn bfs_all<S, F, I>(start: S, mut next: F) -> HashMap<S, usize>
where
    S: Clone + Eq + Hash,
    F: FnMut(&S) -> I,
    I: IntoIterator<Item = S>,
{
    let mut dist = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let d = dist[&s];
        for t in next(&s) {
            if !dist.contains_key(&t) {
                dist.insert(t.clone(), d + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// Length of a shortest path to a goal state, or `None`.
pub fn bfs_goal<S, F, G, I>(start: S, mut next: F, goal: G) -> Option<usize>
where
    S: Clone + Eq + Hash,
    F: FnMut(&S) -> I,
    G: Fn(&S) -> bool,
    I: IntoIterator<Item = S>,
{
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if goal(&s) {
            return Some(d);
        }
        for t in next(&s) {
            if seen.insert(t.clone()) {
                queue.push_back((t, d + 1));
            }
        }
    }
    None
}

/// Distances over the compiled task's own successor function.
pub fn task_distances(task: &GroundTask) -> HashMap<Packed, usize> {
    bfs_all(task.initial().clone(), |s: &Packed| {
        task.successors(s).map(|(_, t)| t).collect::<Vec<_>>()
    })
}

pub fn task_optimum(task: &GroundTask) -> Option<usize> {
    bfs_goal(
        task.initial().clone(),
        |s: &Packed| task.successors(s).map(|(_, t)| t).collect::<Vec<_>>(),
        |s| task.is_goal(s),
    )
}

/// Slot values keyed by the compiled fluent's display name.
pub fn decode_named(task: &GroundTask, s: &Packed) -> HashMap<String, String> {
    task.slots
        .iter()
        .enumerate()
        .map(|(i, g)| (g.to_string(), task.decode(i, s).to_string()))
        .collect()
}

// Robot on an n×n grid: the state is the robot's cell.

pub fn robot_distances(n: usize) -> HashMap<(usize, usize), usize> {
    bfs_all((0usize, 0usize), |&(r, c)| {
        let mut out = Vec::new();
        if c + 1 < n {
            out.push((r, c + 1));
        }
        if c > 0 {
            out.push((r, c - 1));
        }
        if r > 0 {
            out.push((r - 1, c));
        }
        if r + 1 < n {
            out.push((r + 1, c));
        }
        out
    })
}

// Delivery: robot position and package position (None while held), with
// positions P00, P01, P10, P11 numbered 0..4.

pub type DeliveryState = (usize, Option<usize>);

pub fn delivery_distances() -> HashMap<DeliveryState, usize> {
    bfs_all((0usize, Some(2usize)), |&(robot, package)| {
        let mut out: Vec<DeliveryState> = (0..4).map(|to| (to, package)).collect();
        match package {
            Some(p) if p == robot => out.push((robot, None)),
            None => out.push((robot, Some(robot))),
            _ => {}
        }
        out
    })
}

pub const DELIVERY_POSITIONS: [&str; 4] = ["P00", "P01", "P10", "P11"];

// Sliding puzzle on a 3×3 board.

pub fn eight_puzzle_optimum(tiles: [u8; 9]) -> Option<usize> {
    let goal: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 0];
    bfs_goal(
        tiles,
        |s: &[u8; 9]| {
            let z = s.iter().position(|&t| t == 0).unwrap();
            let (r, c) = (z / 3, z % 3);
            let mut out = Vec::with_capacity(4);
            let mut swap = |o: usize| {
                let mut t = *s;
                t.swap(z, o);
                out.push(t);
            };
            if r > 0 {
                swap(z - 3);
            }
            if r < 2 {
                swap(z + 3);
            }
            if c > 0 {
                swap(z - 1);
            }
            if c < 2 {
                swap(z + 1);
            }
            out
        },
        |s| *s == goal,
    )
}

// Rush Hour: a state is the top-left cell of each vehicle; a move slides one
// vehicle any number of free cells along its axis.

struct Car {
    len: usize,
    horizontal: bool,
}

pub fn rush_hour_optimum(grid: &str) -> Option<usize> {
    let chars: Vec<char> = grid.chars().collect();
    assert_eq!(chars.len(), 36);
    let mut names: Vec<char> = Vec::new();
    let mut cells: HashMap<char, Vec<usize>> = HashMap::new();
    for (i, &ch) in chars.iter().enumerate() {
        if ch != 'o' && ch != '.' {
            if !names.contains(&ch) {
                names.push(ch);
            }
            cells.entry(ch).or_default().push(i);
        }
    }
    let cars: Vec<Car> = names
        .iter()
        .map(|n| {
            let cs = &cells[n];
            Car {
                len: cs.len(),
                horizontal: cs[1] == cs[0] + 1,
            }
        })
        .collect();
    let start: Vec<usize> = names.iter().map(|n| cells[n][0]).collect();
    let red = names.iter().position(|&n| n == 'A').unwrap();

    let board = |s: &Vec<usize>| {
        let mut b = [usize::MAX; 36];
        for (v, &pos) in s.iter().enumerate() {
            let step = if cars[v].horizontal { 1 } else { 6 };
            for k in 0..cars[v].len {
                b[pos + k * step] = v;
            }
        }
        b
    };
    let next = |s: &Vec<usize>| {
        let b = board(s);
        let mut out = Vec::new();
        for (v, car) in cars.iter().enumerate() {
            let (r, c) = ((s[v] / 6) as i64, (s[v] % 6) as i64);
            let (dr, dc) = if car.horizontal { (0, 1) } else { (1, 0) };
            for dir in [-1i64, 1] {
                let mut k = 1;
                loop {
                    // Cell entered when sliding k cells in `dir`.
                    let lead = if dir > 0 { car.len as i64 - 1 + k } else { -k };
                    let (nr, nc) = (r + dr * lead, c + dc * lead);
                    if !(0..6).contains(&nr) || !(0..6).contains(&nc) || b[(nr * 6 + nc) as usize] != usize::MAX {
                        break;
                    }
                    let mut t = s.clone();
                    t[v] = ((r + dr * dir * k) * 6 + c + dc * dir * k) as usize;
                    out.push(t);
                    k += 1;
                }
            }
        }
        out
    };
    bfs_goal(start, next, |s| s[red] % 6 + cars[red].len - 1 == 5)
}

// Plotting: grid of colour indices (None = empty), hand as Some(colour) or
// None for the wildcard. Row shots enter from the left, column shots from the
// top; cleared row cells let the blocks above fall.

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlotState {
    pub grid: Vec<Vec<Option<u8>>>,
    pub hand: Option<u8>,
}

pub fn plotting_optimum(grid: &[Vec<Option<u8>>], colours: u8, max_remaining: usize) -> Option<usize> {
    let rows = grid.len();
    let cols = grid[0].len();
    let start = PlotState {
        grid: grid.to_vec(),
        hand: None,
    };
    let next = |s: &PlotState| {
        let mut out = Vec::new();
        for p in 0..colours {
            if s.hand.is_some_and(|h| h != p) {
                continue;
            }
            for r in 0..rows {
                let run = (0..cols).take_while(|&c| s.grid[r][c].is_none_or(|x| x == p)).count();
                if !(0..run).any(|c| s.grid[r][c] == Some(p)) {
                    continue;
                }
                let mut t = s.clone();
                let cleared = if run == cols {
                    t.hand = Some(p);
                    cols
                } else {
                    t.hand = s.grid[r][run];
                    t.grid[r][run] = Some(p);
                    run
                };
                for c in 0..cleared {
                    for row in (1..=r).rev() {
                        t.grid[row][c] = s.grid[row - 1][c];
                    }
                    t.grid[0][c] = None;
                }
                out.push(t);
            }
            for c in 0..cols {
                let run = (0..rows).take_while(|&r| s.grid[r][c].is_none_or(|x| x == p)).count();
                if !(0..run).any(|r| s.grid[r][c] == Some(p)) {
                    continue;
                }
                let mut t = s.clone();
                if run == rows {
                    t.hand = Some(p);
                } else {
                    t.hand = s.grid[run][c];
                    t.grid[run][c] = Some(p);
                }
                for r in 0..run {
                    t.grid[r][c] = None;
                }
                out.push(t);
            }
        }
        out
    };
    bfs_goal(start, next, |s| {
        s.grid.iter().flatten().filter(|c| c.is_some()).count() <= max_remaining
    })
}

/// Parses rows of colour names against `colours`; `N` is empty.
pub fn plot_grid(rows: &[&str], colours: &[char]) -> Vec<Vec<Option<u8>>> {
    rows.iter()
        .map(|row| {
            row.chars()
                .map(|ch| colours.iter().position(|&c| c == ch).map(|i| i as u8))
                .collect()
        })
        .collect()
}
