//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use planforge::compile::{fold_out_of_range, UndefinednessMode};
use planforge::domains::{delivery, gen_npuzzle, gen_plotting, gen_rushhour, robot_grid};
use planforge::eval::{evaluate, evaluate_bool, simplify, Binding, OutOfRange};
use planforge::model::{ExprKind, GroundFluent, ProblemBuilder};
use planforge::pipeline::{compile, run_passes, Compiled, FeatureSet, Options, Pass};
use planforge::search::{solve, validate, GroundTask, Packed, SearchConfig, Strategy};
use planforge::{Action, Effect, Expr, Fluent, Problem, State, Type, Value};

use common::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn opts(mode: UndefinednessMode) -> Options {
    Options { mode, force: false }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("integer parameters are grounded per value combination", int_params),
        ("arrays flatten into scalar fluents with defaults", arrays),
        ("undefined array accesses fold, simplify and are reported", undefinedness),
        ("Count is replaced by counter fluents kept in sync", count_goldens),
        ("hardest 8-puzzles solve optimally in 31 moves", eight_puzzles),
        ("compiled problems agree with hand-written solvers", oracles),
        ("plans of compiled problems validate on the source", round_trip),
        ("counters match their arguments in every reachable state", count_property),
        ("simplification preserves values and is idempotent", simplifier_property),
        ("PDDL output passes the linter and is deterministic", pddl_export),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            Err(panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn robot_cell(at_robot: &Fluent, r: i64, c: i64) -> Expr {
    at_robot.at(&[r, c]).unwrap()
}

fn int_params() -> Outcome {
    let source = robot_grid(3).map_err(err)?;
    let c = run_passes(&source, &[Pass::IntParams], UndefinednessMode::Restrictive).map_err(err)?;
    let names: Vec<&str> = c
        .problem
        .actions()
        .iter()
        .map(|a| &*a.name)
        .filter(|n| n.starts_with("move_right"))
        .collect();
    let expected = ["move_right_0_0", "move_right_0_1", "move_right_1_0", "move_right_1_1", "move_right_2_0", "move_right_2_1"];
    ensure!(names == expected, "move_right groundings {names:?}");
    ensure!(c.problem.actions().len() == 24, "{} ground actions", c.problem.actions().len());

    let at_robot = source.fluent("at_robot").unwrap().clone();
    let a = c.problem.action("move_right_0_1").unwrap();
    ensure!(a.params.is_empty(), "parameters left: {:?}", a.params);
    ensure!(a.preconditions == vec![robot_cell(&at_robot, 0, 1)], "{a}");
    let effects = vec![
        Effect::new(robot_cell(&at_robot, 0, 2), Expr::bool(true)).unwrap(),
        Effect::new(robot_cell(&at_robot, 0, 1), Expr::bool(false)).unwrap(),
    ];
    ensure!(a.effects == effects, "{a}");
    let text = "action move_right_0_1 {\n  preconditions = [\n    at_robot[0][1]\n  ]\n  effects = [\n    at_robot[0][2] := true\n    at_robot[0][1] := false\n  ]\n}";
    ensure!(a.to_string() == text, "{a}");
    let origin = &c.action_map["move_right_0_1"];
    ensure!(&*origin.source == "move_right", "origin {}", origin.source);
    ensure!(
        origin.binding.get("r") == Some(&Value::Int(0)) && origin.binding.get("c") == Some(&Value::Int(1)),
        "binding of move_right_0_1"
    );
    Ok(())
}

fn arrays() -> Outcome {
    let source = robot_grid(3).map_err(err)?;
    let c = run_passes(&source, &[Pass::IntParams, Pass::Arrays], UndefinednessMode::Restrictive)
        .map_err(err)?;
    let p = &c.problem;
    let names: Vec<String> = p.fluents().iter().map(|f| f.name.to_string()).collect();
    let expected: Vec<String> = (0..3)
        .flat_map(|r| (0..3).map(move |c| format!("at_robot_{r}_{c}")))
        .collect();
    ensure!(names == expected, "fluents {names:?}");
    for f in p.fluents() {
        ensure!(f.value_type == Type::Bool && f.params.is_empty(), "{} is {}", f.name, f.value_type);
        ensure!(f.default == Some(Value::Bool(false)), "{} default {:?}", f.name, f.default);
    }
    let init = p.initial_state().map_err(err)?;
    for f in p.fluents() {
        let v = init.get(&GroundFluent::new(&f.name, vec![])).unwrap();
        let want = Value::Bool(&*f.name == "at_robot_0_0");
        ensure!(*v == want, "initial {} = {v}", f.name);
    }
    let a = p.action("move_right_0_1").unwrap();
    let shown: Vec<String> = a.effects.iter().map(|e| e.to_string()).collect();
    ensure!(a.preconditions[0].to_string() == "at_robot_0_1", "{a}");
    ensure!(shown == ["at_robot_0_2 := true", "at_robot_0_1 := false"], "{shown:?}");
    Ok(())
}

fn undefinedness() -> Outcome {
    let at_robot = Fluent::new("at_robot", vec![], Type::array_of(&[3, 3], Type::Bool).unwrap());
    let e = Expr::and(vec![robot_cell(&at_robot, 2, 2), robot_cell(&at_robot, 2, 3)]).unwrap();
    let folded = fold_out_of_range(&e).map_err(err)?;
    ensure!(folded.to_string() == "And(at_robot[2][2], false)", "folded {folded}");
    ensure!(simplify(&folded) == Expr::bool(false), "simplified {}", simplify(&folded));

    let my_ints = Fluent::new("my_ints", vec![], Type::array(3, Type::int(0, 9).unwrap()).unwrap());
    let e = Expr::or(vec![
        Expr::equals(
            Expr::plus(vec![my_ints.at(&[3]).unwrap(), Expr::int(2)]).unwrap(),
            Expr::int(2),
        )
        .unwrap(),
        Expr::equals(my_ints.at(&[2]).unwrap(), Expr::int(0)).unwrap(),
    ])
    .unwrap();
    let s = simplify(&fold_out_of_range(&e).map_err(err)?);
    ensure!(s.to_string() == "Equals(my_ints[2], 0)", "simplified {s}");

    // Same expression reached through compilation of a parameterised action.
    let mut pb = Problem::builder("peek");
    let grid = pb.fluent("at_robot", &[], Type::array_of(&[3, 3], Type::Bool).unwrap()).unwrap();
    pb.set_default(&grid, Value::filled(&[3, 3], &Value::Bool(false))).unwrap();
    let done = pb.fluent("done", &[], Type::Bool).unwrap();
    let mut a = Action::builder("peek");
    let c = a.int_param("c", 0, 2).unwrap();
    let right = Expr::plus(vec![c.clone(), Expr::int(1)]).unwrap();
    a.precondition(
        Expr::and(vec![
            grid.cell(vec![Expr::int(2), c]).unwrap(),
            grid.cell(vec![Expr::int(2), right]).unwrap(),
        ])
        .unwrap(),
    )
    .unwrap();
    a.effect(done.get().unwrap(), Expr::bool(true)).unwrap();
    pb.add_action(a.build().unwrap()).unwrap();
    pb.add_goal(done.get().unwrap()).unwrap();
    let p = pb.build().unwrap();

    let permissive = compile(&p, opts(UndefinednessMode::Permissive)).map_err(err)?;
    let edge = permissive.problem.action("peek_2").ok_or("peek_2 missing")?;
    ensure!(edge.preconditions == vec![Expr::bool(false)], "{edge}");
    ensure!(
        permissive.notes().any(|n| n.contains("peek_2") && n.contains("false")),
        "notes {:?}",
        permissive.notes().collect::<Vec<_>>()
    );
    let restrictive = compile(&p, opts(UndefinednessMode::Restrictive));
    let msg = restrictive.err().ok_or("restrictive mode accepted at_robot[2][3]")?.to_string();
    ensure!(msg.contains("undefined array access at_robot[2][3]"), "error: {msg}");

    // Out-of-board effects: dropped when permissive, an error otherwise.
    let rh = gen_rushhour("oooBoooooBooAAoBoooooooooooooooooCCo").map_err(err)?;
    let msg = compile(&rh, opts(UndefinednessMode::Restrictive))
        .err()
        .ok_or("restrictive Rush Hour compiled")?
        .to_string();
    ensure!(
        msg.contains("undefined array access occupied[") && msg.contains("in effect of action move_"),
        "error: {msg}"
    );
    let c = compile(&rh, opts(UndefinednessMode::Permissive)).map_err(err)?;
    ensure!(
        c.notes().any(|n| n.starts_with("dropped action move_")),
        "no dropped-action notes"
    );
    Ok(())
}

fn count_goldens() -> Outcome {
    let c = compile(&robot_grid(3).map_err(err)?, Options::default()).map_err(err)?;
    let p = &c.problem;
    let goals: Vec<String> = p.goals().iter().map(|g| g.to_string()).collect();
    let counters: Vec<String> = (0..9).map(|k| format!("count_{k}")).collect();
    let want = format!("Equals(Plus({}), 1)", counters.join(", "));
    ensure!(goals.contains(&want), "goals {goals:?}");
    ensure!(goals.contains(&"at_robot_2_2".to_string()), "goals {goals:?}");
    let init = p.initial_state().map_err(err)?;
    for (k, name) in counters.iter().enumerate() {
        let v = init.get(&GroundFluent::new(name, vec![])).ok_or(format!("{name} missing"))?;
        ensure!(*v == Value::Int((k == 0) as i64), "initial {name} = {v}");
        let f = p.fluent(name).unwrap();
        ensure!(f.value_type == Type::int(0, 1).unwrap(), "{name}: {}", f.value_type);
    }
    let a = p.action("move_right_0_0").unwrap();
    let effects: Vec<String> = a.effects.iter().map(|e| e.to_string()).collect();
    ensure!(
        effects == ["at_robot_0_1 := true", "at_robot_0_0 := false", "count_0 := 0", "count_1 := 1"],
        "{effects:?}"
    );
    Ok(())
}

fn eight_puzzles() -> Outcome {
    for tiles in [
        [[8, 6, 7], [2, 5, 4], [3, 0, 1]],
        [[6, 4, 7], [8, 5, 0], [3, 2, 1]],
    ] {
        let rows: Vec<Vec<i64>> = tiles.iter().map(|r| r.to_vec()).collect();
        let started = Instant::now();
        let c = compile(&gen_npuzzle(3, &rows).map_err(err)?, Options::default()).map_err(err)?;
        let config = SearchConfig {
            timeout: Some(Duration::from_secs(60)),
            ..SearchConfig::default()
        };
        let plan = solve(&c.problem, &config).map_err(err)?.plan.ok_or("no plan")?;
        let elapsed = started.elapsed();
        ensure!(plan.len() == 31, "{tiles:?}: {} moves", plan.len());
        ensure!(elapsed < Duration::from_secs(60), "{tiles:?} took {elapsed:?}");
        let report = validate(&c.source, &c.map_plan_back(&plan).map_err(err)?, UndefinednessMode::Restrictive)
            .map_err(err)?;
        ensure!(report.is_valid(), "{report}");
    }
    Ok(())
}

fn plan_length(c: &Compiled) -> Result<Option<usize>, String> {
    Ok(solve(&c.problem, &SearchConfig::default()).map_err(err)?.plan.map(|p| p.len()))
}

fn oracles() -> Outcome {
    // Robot grids: same reachable positions at the same depths.
    for n in [3, 4] {
        let c = compile(&robot_grid(n).map_err(err)?, Options::default()).map_err(err)?;
        let task = GroundTask::new(&c.problem).map_err(err)?;
        let got = task_distances(&task);
        let want = robot_distances(n);
        ensure!(got.len() == want.len(), "robot {n}: {} states, oracle {}", got.len(), want.len());
        for (s, d) in &got {
            let named = decode_named(&task, s);
            let on: Vec<(usize, usize)> = (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .filter(|(r, c)| named[&format!("at_robot_{r}_{c}")] == "true")
                .collect();
            ensure!(on.len() == 1, "robot {n}: occupied cells {on:?}");
            ensure!(want.get(&on[0]) == Some(d), "robot {n}: {:?} at depth {d}", on[0]);
            for (k, (r, cc)) in (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).enumerate() {
                let expected = if (r, cc) == on[0] { "1" } else { "0" };
                ensure!(named[&format!("count_{k}")] == expected, "robot {n}: count_{k} out of sync");
            }
        }
        ensure!(plan_length(&c)? == Some(2 * (n - 1)), "robot {n} plan length");
    }

    // Delivery.
    let c = compile(&delivery().map_err(err)?, Options::default()).map_err(err)?;
    let task = GroundTask::new(&c.problem).map_err(err)?;
    let want = delivery_distances();
    let got = task_distances(&task);
    ensure!(got.len() == want.len(), "delivery: {} states, oracle {}", got.len(), want.len());
    for (s, d) in &got {
        let named = decode_named(&task, s);
        let robot: Vec<usize> = (0..4).filter(|&i| named[&format!("at_robot({})", DELIVERY_POSITIONS[i])] == "true").collect();
        let package: Vec<usize> = (0..4).filter(|&i| named[&format!("at_package({})", DELIVERY_POSITIONS[i])] == "true").collect();
        let holding = named["holding_package"] == "true";
        ensure!(robot.len() == 1, "delivery: robot at {robot:?}");
        let pkg = match (package.as_slice(), holding) {
            ([p], false) => Some(*p),
            ([], true) => None,
            other => return Err(format!("delivery: package state {other:?}")),
        };
        ensure!(want.get(&(robot[0], pkg)) == Some(d), "delivery: {:?} at depth {d}", (robot[0], pkg));
    }
    let oracle_opt = want.iter().filter(|((_, p), _)| *p == Some(3)).map(|(_, d)| *d).min();
    ensure!(oracle_opt == Some(4), "delivery oracle optimum {oracle_opt:?}");
    ensure!(plan_length(&c)? == oracle_opt, "delivery plan length");

    // Sliding puzzles.
    for tiles in [[8, 6, 7, 2, 5, 4, 3, 0, 1], [6, 4, 7, 8, 5, 0, 3, 2, 1], [1, 2, 3, 4, 5, 6, 0, 7, 8]] {
        let rows: Vec<Vec<i64>> = tiles.chunks(3).map(|r| r.iter().map(|&t| t as i64).collect()).collect();
        let c = compile(&gen_npuzzle(3, &rows).map_err(err)?, Options::default()).map_err(err)?;
        let want = eight_puzzle_optimum(tiles);
        ensure!(plan_length(&c)? == want, "8-puzzle {tiles:?}: oracle {want:?}");
    }

    // Rush Hour.
    for (grid, optimum) in [
        ("ooooooooooooooAAoooooooooooooooooooo", Some(1)),
        ("oooBoooooBooAAoBoooooooooooooooooCCo", Some(3)),
        ("oooBoooooBooAAoBoooooooooooooooCCooo", Some(2)),
        (RUSH_HOUR_BENCHMARK, None),
    ] {
        let want = rush_hour_optimum(grid);
        if let Some(o) = optimum {
            ensure!(want == Some(o), "Rush Hour oracle {grid}: {want:?}");
        }
        let c = compile(&gen_rushhour(grid).map_err(err)?, opts(UndefinednessMode::Permissive)).map_err(err)?;
        let got = plan_length(&c)?;
        ensure!(got == want, "Rush Hour {grid}: planner {got:?}, oracle {want:?}");
    }

    // Plotting, on random small boards.
    let mut rng = StdRng::seed_from_u64(11);
    let names = ['R', 'B', 'G'];
    for _ in 0..25 {
        let rows = rng.gen_range(2..=3);
        let cols = rng.gen_range(2..=3);
        let k = rng.gen_range(2..=3);
        let board: Vec<String> = (0..rows)
            .map(|_| (0..cols).map(|_| names[rng.gen_range(0..k)]).collect())
            .collect();
        let max = rng.gen_range(0..rows * cols);
        let strs: Vec<&str> = board.iter().map(String::as_str).collect();
        let want = plotting_optimum(&plot_grid(&strs, &names[..k]), k as u8, max);
        let cells: Vec<Vec<String>> = board.iter().map(|r| r.chars().map(String::from).collect()).collect();
        let cell_refs: Vec<Vec<&str>> = cells.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let colour_names: Vec<String> = names[..k].iter().map(|c| c.to_string()).collect();
        let colour_refs: Vec<&str> = colour_names.iter().map(String::as_str).collect();
        let p = gen_plotting(rows, cols, &colour_refs, &cell_refs, max as i64).map_err(err)?;
        let c = compile(&p, Options::default()).map_err(err)?;
        let got = plan_length(&c)?;
        ensure!(got == want, "Plotting {board:?} max {max}: planner {got:?}, oracle {want:?}");
    }
    let want = plotting_optimum(&plot_grid(&["RRB", "BBB", "BBB"], &['R', 'B']), 2, 4);
    ensure!(want == Some(2), "Plotting 3x3 oracle {want:?}");
    Ok(())
}

fn round_trip() -> Outcome {
    for (label, source, mode) in bundled() {
        let c = compile(&source, opts(mode)).map_err(|e| format!("{label}: {e}"))?;
        let config = SearchConfig {
            strategy: if label.starts_with("plotting_5x5") {
                Strategy::AStar
            } else {
                Strategy::Bfs
            },
            timeout: Some(Duration::from_secs(120)),
            ..SearchConfig::default()
        };
        let plan = solve(&c.problem, &config)
            .map_err(|e| format!("{label}: {e}"))?
            .plan
            .ok_or(format!("{label}: no plan"))?;
        let low = validate(&c.problem, &plan, mode).map_err(|e| format!("{label}: {e}"))?;
        ensure!(low.is_valid(), "{label}: compiled plan {low}");
        let high = c.map_plan_back(&plan).map_err(|e| format!("{label}: {e}"))?;
        ensure!(high.len() == plan.len(), "{label}: plan length changed");
        let report = validate(&source, &high, mode).map_err(|e| format!("{label}: {e}"))?;
        ensure!(report.is_valid(), "{label}: {report}");
        // A truncated plan must not reach the goal.
        if !high.is_empty() {
            let short = planforge::Plan::new(high.steps[..high.len() - 1].to_vec());
            let report = validate(&source, &short, mode).map_err(|e| format!("{label}: {e}"))?;
            ensure!(!report.is_valid(), "{label}: prefix of an optimal plan validated");
        }
    }
    Ok(())
}

/// Random closed Boolean formula over `atoms`.
fn random_formula(rng: &mut StdRng, atoms: &[Expr], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.35) {
        let a = atoms[rng.gen_range(0..atoms.len())].clone();
        return if rng.gen_bool(0.25) { Expr::not(a).unwrap() } else { a };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Expr::not(sub(rng)).unwrap(),
        1 => Expr::and(vec![sub(rng), sub(rng)]).unwrap(),
        2 => Expr::or(vec![sub(rng), sub(rng)]).unwrap(),
        3 => Expr::implies(sub(rng), sub(rng)).unwrap(),
        _ => Expr::iff(sub(rng), sub(rng)).unwrap(),
    }
}

fn state_of(task: &GroundTask, s: &Packed) -> State {
    State::from_map(
        task.slots
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), task.decode(i, s)))
            .collect::<BTreeMap<_, _>>(),
    )
}

/// Counter fluents in order of appearance in `e`.
fn counters_in(e: &Expr, source: &Problem) -> Vec<String> {
    let mut out = Vec::new();
    e.walk(&mut |x| {
        if let ExprKind::Fluent(f) = x.kind() {
            if source.fluent(&f.name).is_none() {
                out.push(f.name.to_string());
            }
        }
    });
    out
}

fn count_property() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut states_checked = 0usize;
    for trial in 0..1000 {
        let n = rng.gen_range(2..=6);
        let mut pb = Problem::builder(&format!("random_{trial}"));
        let fluents: Vec<Fluent> = (0..n).map(|i| pb.fluent(&format!("f{i}"), &[], Type::Bool).unwrap()).collect();
        let atoms: Vec<Expr> = fluents.iter().map(|f| f.get().unwrap()).collect();
        for a in &atoms {
            if rng.gen_bool(0.5) {
                pb.set_initial_value(a, true).unwrap();
            }
        }
        let k = rng.gen_range(1..=4);
        let args: Vec<Expr> = (0..k).map(|_| random_formula(&mut rng, &atoms, 2)).collect();
        let count = Expr::count(args.clone()).unwrap();
        let bound = Expr::int(rng.gen_range(0..=k as i64));
        let goal = match rng.gen_range(0..3) {
            0 => Expr::equals(count, bound),
            1 => Expr::le(count, bound),
            _ => Expr::ge(count, bound),
        }
        .unwrap();
        pb.add_goal(goal.clone()).unwrap();
        for j in 0..rng.gen_range(1..=4) {
            let mut act = Action::builder(&format!("act{j}"));
            if rng.gen_bool(0.3) {
                act.precondition(random_formula(&mut rng, &atoms, 1)).unwrap();
            }
            let mut targets: Vec<usize> = (0..n).collect();
            for _ in 0..rng.gen_range(1..=3.min(n)) {
                let t = targets.swap_remove(rng.gen_range(0..targets.len()));
                let value = if rng.gen_bool(0.5) {
                    Expr::bool(rng.gen_bool(0.5))
                } else {
                    random_formula(&mut rng, &atoms, 1)
                };
                if rng.gen_bool(0.4) {
                    let cond = random_formula(&mut rng, &atoms, 1);
                    act.conditional_effect(cond, atoms[t].clone(), value).unwrap();
                } else {
                    act.effect(atoms[t].clone(), value).unwrap();
                }
            }
            pb.add_action(act.build().unwrap()).unwrap();
        }
        let source = pb.build().unwrap();
        let c = compile(&source, Options::default()).map_err(|e| format!("trial {trial}: {e}"))?;
        let counters = c
            .problem
            .goals()
            .iter()
            .flat_map(|g| counters_in(g, &source))
            .collect::<Vec<_>>();
        ensure!(counters.len() == k, "trial {trial}: goal {:?} uses {counters:?}", c.problem.goals());
        let task = GroundTask::new(&c.problem).map_err(err)?;
        for s in task_distances(&task).keys() {
            let state = state_of(&task, s);
            for (arg, counter) in args.iter().zip(&counters) {
                let truth = evaluate_bool(arg, &state, &Binding::new(), OutOfRange::Error).map_err(err)?;
                let value = state.get(&GroundFluent::new(counter, vec![])).unwrap();
                ensure!(
                    *value == Value::Int(truth as i64),
                    "trial {trial}: {counter} = {value} but {arg} is {truth}"
                );
            }
            let source_goal = evaluate_bool(&goal, &state, &Binding::new(), OutOfRange::Error).map_err(err)?;
            ensure!(task.is_goal(s) == source_goal, "trial {trial}: goal verdicts differ");
            states_checked += 1;
        }
    }
    ensure!(states_checked > 1000, "only {states_checked} states checked");
    Ok(())
}

struct Vocabulary {
    bools: Vec<Expr>,
    ints: Vec<Expr>,
    colour: Expr,
    colours: Vec<Expr>,
    problem: Problem,
}

fn vocabulary() -> Vocabulary {
    let mut pb: ProblemBuilder = Problem::builder("exprs");
    let colour_ty = pb.user_type("Colour").unwrap();
    let colours: Vec<Expr> = ["R", "G", "B"].iter().map(|c| pb.object(c, &colour_ty).unwrap()).collect();
    let bools: Vec<Expr> = (0..3)
        .map(|i| {
            let f = pb.fluent(&format!("b{i}"), &[], Type::Bool).unwrap();
            pb.set_default(&f, false).unwrap();
            f.get().unwrap()
        })
        .collect();
    let mut ints: Vec<Expr> = (0..2)
        .map(|i| {
            let f = pb.fluent(&format!("x{i}"), &[], Type::int(-3, 3).unwrap()).unwrap();
            pb.set_default(&f, 0i64).unwrap();
            f.get().unwrap()
        })
        .collect();
    let arr = pb.fluent("arr", &[], Type::array(3, Type::int(0, 5).unwrap()).unwrap()).unwrap();
    pb.set_default(&arr, Value::filled(&[3], &Value::Int(0))).unwrap();
    ints.extend((0..3).map(|i| arr.at(&[i]).unwrap()));
    let colour = pb.fluent("paint", &[], colour_ty).unwrap().get().unwrap();
    pb.set_initial_value(&colour, Value::object("R")).unwrap();
    Vocabulary {
        bools,
        ints,
        colour,
        colours,
        problem: pb.build().unwrap(),
    }
}

impl Vocabulary {
    fn boolean(&self, rng: &mut StdRng, depth: u32) -> Expr {
        if depth == 0 || rng.gen_bool(0.25) {
            return match rng.gen_range(0..4) {
                0 => Expr::bool(rng.gen_bool(0.5)),
                1 => Expr::equals(self.colour.clone(), self.colours[rng.gen_range(0..3)].clone()).unwrap(),
                _ => self.bools[rng.gen_range(0..self.bools.len())].clone(),
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..11) {
            0 | 1 => Expr::not(self.boolean(rng, d)).unwrap(),
            2 => Expr::and((0..rng.gen_range(1..=3)).map(|_| self.boolean(rng, d)).collect()).unwrap(),
            3 => Expr::or((0..rng.gen_range(1..=3)).map(|_| self.boolean(rng, d)).collect()).unwrap(),
            4 => Expr::implies(self.boolean(rng, d), self.boolean(rng, d)).unwrap(),
            5 => Expr::iff(self.boolean(rng, d), self.boolean(rng, d)).unwrap(),
            6 => Expr::equals(self.integer(rng, d), self.integer(rng, d)).unwrap(),
            7 => Expr::le(self.integer(rng, d), self.integer(rng, d)).unwrap(),
            8 => Expr::lt(self.integer(rng, d), self.integer(rng, d)).unwrap(),
            9 => Expr::ge(self.integer(rng, d), self.integer(rng, d)).unwrap(),
            _ => Expr::gt(self.integer(rng, d), self.integer(rng, d)).unwrap(),
        }
    }

    fn integer(&self, rng: &mut StdRng, depth: u32) -> Expr {
        if depth == 0 || rng.gen_bool(0.3) {
            return if rng.gen_bool(0.4) {
                Expr::int(rng.gen_range(-4..=4))
            } else {
                self.ints[rng.gen_range(0..self.ints.len())].clone()
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..4) {
            0 => Expr::plus((0..rng.gen_range(1..=3)).map(|_| self.integer(rng, d)).collect()).unwrap(),
            1 => Expr::minus(self.integer(rng, d), self.integer(rng, d)).unwrap(),
            2 => Expr::times((0..rng.gen_range(1..=2)).map(|_| self.integer(rng, d)).collect()).unwrap(),
            _ => Expr::count((0..rng.gen_range(1..=3)).map(|_| self.boolean(rng, d)).collect()).unwrap(),
        }
    }

    fn state(&self, rng: &mut StdRng) -> State {
        let mut s = self.problem.initial_state().unwrap();
        let mut set = |name: &str, v: Value| {
            *s.get_mut(&GroundFluent::new(name, vec![])).unwrap() = v;
        };
        for i in 0..3 {
            set(&format!("b{i}"), Value::Bool(rng.gen_bool(0.5)));
        }
        for i in 0..2 {
            set(&format!("x{i}"), Value::Int(rng.gen_range(-3..=3)));
        }
        set("arr", Value::Array((0..3).map(|_| Value::Int(rng.gen_range(0..=5))).collect()));
        set("paint", Value::object(["R", "G", "B"][rng.gen_range(0..3)]));
        s
    }
}

fn simplifier_property() -> Outcome {
    let vocab = vocabulary();
    let mut rng = StdRng::seed_from_u64(99);
    let states: Vec<State> = (0..100).map(|_| vocab.state(&mut rng)).collect();
    let none = Binding::new();
    let mut shrunk = 0usize;
    for i in 0..10_000 {
        let e = if i % 3 == 0 { vocab.integer(&mut rng, 4) } else { vocab.boolean(&mut rng, 4) };
        let s = simplify(&e);
        ensure!(simplify(&s) == s, "not idempotent: {e} -> {s} -> {}", simplify(&s));
        ensure!(s.ty().is_bool() == e.ty().is_bool(), "type changed: {e} -> {s}");
        ensure!(s.node_count() <= e.node_count(), "simplification grew {e} into {s}");
        if s.node_count() < e.node_count() {
            shrunk += 1;
        }
        for state in &states {
            let before = evaluate(&e, state, &none).map_err(|x| format!("{e}: {x}"))?;
            let after = evaluate(&s, state, &none).map_err(|x| format!("{s}: {x}"))?;
            ensure!(before == after, "{e} = {before} but {s} = {after}");
        }
    }
    ensure!(shrunk > 1000, "simplifier rarely did anything ({shrunk} of 10000)");
    Ok(())
}

fn pddl_export() -> Outcome {
    let mut exported = 0;
    for (label, source, mode) in bundled() {
        let first = compile(&source, opts(mode)).map_err(|e| format!("{label}: {e}"))?;
        let files = planforge::pddl::export(&first.problem).map_err(|e| format!("{label}: {e}"))?;
        planforge::pddl::lint(&files.domain, &files.problem).map_err(|e| format!("{label}: {e}"))?;
        let again = compile(&source, opts(mode)).map_err(err)?;
        let files2 = planforge::pddl::export(&again.problem).map_err(err)?;
        ensure!(files.domain == files2.domain && files.problem == files2.problem, "{label}: output differs between runs");
        if !FeatureSet::of(&source).is_empty() {
            ensure!(planforge::pddl::export(&source).is_err(), "{label}: high-level problem exported");
        }
        exported += 1;
    }
    let c = compile(&robot_grid(3).map_err(err)?, Options::default()).map_err(err)?;
    let files = planforge::pddl::export(&c.problem).map_err(err)?;
    ensure!(files.domain.contains("(:action move_right_0_1"), "robot domain lacks move_right_0_1");
    ensure!(files.problem.contains("(at_robot_0_0)"), "robot problem lacks initial atom");
    ensure!(exported >= 8, "only {exported} instances exported");
    Ok(())
}
