//! Command-line front end. `main` only forwards to [`run_with`], so every
//! command can be driven in-process.
//!
//! Exit codes: 0 success, 1 other failure (I/O, no plan exists),
//! 2 parse error, 3 compile error, 4 invalid plan, 5 search limit reached.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use crate::compile::UndefinednessMode;
use crate::domains;
use crate::format::{self, load_problem, save_problem};
use crate::model::{Plan, Problem};
use crate::pipeline::{self, Compiled, FeatureSet, Options};
use crate::search::{self, SearchConfig, SearchError, Strategy};
use crate::pddl;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_COMPILE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_TIMEOUT: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "planforge", version, about = "Compile, solve, validate and export planning problems with arrays, Count and integer parameters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Restrictive,
    Permissive,
}

impl From<Mode> for UndefinednessMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Restrictive => UndefinednessMode::Restrictive,
            Mode::Permissive => UndefinednessMode::Permissive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Bfs,
    Astar,
}

#[derive(clap::Args, Debug)]
struct CompileFlags {
    /// Policy for out-of-range array accesses.
    #[arg(long, value_enum, default_value = "restrictive")]
    undefined_mode: Mode,
    /// Run every pass even when its feature is absent.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove high-level features and write the compiled problem as JSON.
    Compile {
        /// Problem JSON or generator spec.
        input: PathBuf,
        #[command(flatten)]
        flags: CompileFlags,
        /// Write one snapshot per pass into this directory.
        #[arg(long, value_name = "DIR")]
        emit_intermediates: Option<PathBuf>,
        /// Output file (default: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile, search, and print the plan in terms of the input problem.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        flags: CompileFlags,
        #[arg(long, value_enum, default_value = "bfs")]
        strategy: StrategyArg,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Time limit in seconds.
        #[arg(long, env = "PLANFORGE_TIMEOUT_SECS")]
        timeout: Option<f64>,
        /// Print the plan over compiled action names.
        #[arg(long)]
        compiled: bool,
        /// Print the plan as JSON.
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a plan (text or JSON) against a problem at any level.
    Validate {
        input: PathBuf,
        plan: PathBuf,
        #[arg(long, value_enum, default_value = "restrictive")]
        undefined_mode: Mode,
    },
    /// Compile if needed and write PDDL domain and problem files.
    Export {
        input: PathBuf,
        #[command(flatten)]
        flags: CompileFlags,
        /// Directory for domain.pddl and problem.pddl.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Generate a benchmark problem as JSON.
    Gen {
        #[command(subcommand)]
        domain: GenCommand,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// n×n robot grid.
    Robot { n: usize },
    /// 2×2 delivery robot.
    Delivery,
    /// Sliding-tile puzzle from rows such as `8 6 7/2 5 4/3 0 1`, or a JSON matrix file.
    Npuzzle { board: String },
    /// Rush Hour from a 36-character grid or a database line.
    Rushhour { grid: String },
    /// Plotting from a JSON file with `grid`, `max_remaining` and optional `colours`.
    Plotting { spec: PathBuf },
}

/// A failed command: exit code and message for standard error.
struct Failure(i32, String);

impl Failure {
    fn parse(e: impl std::fmt::Display) -> Failure {
        Failure(EXIT_PARSE, format!("error: {e}"))
    }

    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure(EXIT_FAILURE, format!("error: {}: {e}", path.display()))
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_PARSE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Compile {
            input,
            flags,
            emit_intermediates,
            output,
        } => cmd_compile(&input, &flags, emit_intermediates.as_deref(), output.as_deref(), out, err),
        Command::Solve {
            input,
            flags,
            strategy,
            max_nodes,
            timeout,
            compiled,
            json,
            output,
        } => {
            let config = SearchConfig {
                strategy: match strategy {
                    StrategyArg::Bfs => Strategy::Bfs,
                    StrategyArg::Astar => Strategy::AStar,
                },
                max_nodes,
                timeout: timeout.map(Duration::from_secs_f64),
            };
            cmd_solve(&input, &flags, &config, compiled, json, output.as_deref(), out, err)
        }
        Command::Validate {
            input,
            plan,
            undefined_mode,
        } => cmd_validate(&input, &plan, undefined_mode.into(), out, err),
        Command::Export { input, flags, out_dir } => cmd_export(&input, &flags, &out_dir, out, err),
        Command::Gen { domain, output } => cmd_gen(&domain, output.as_deref(), out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            if !message.is_empty() {
                let _ = writeln!(err, "{message}");
            }
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_to(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure(EXIT_FAILURE, format!("error: {e}"))),
    }
}

fn load(path: &Path) -> Result<Problem, Failure> {
    load_problem(&read(path)?).map_err(|e| Failure::parse(format_args!("{}: {e}", path.display())))
}

fn compile(problem: &Problem, flags: &CompileFlags, err: &mut dyn Write) -> Result<Compiled, Failure> {
    let options = Options {
        mode: flags.undefined_mode.into(),
        force: flags.force,
    };
    let compiled = pipeline::compile(problem, options).map_err(|e| Failure(EXIT_COMPILE, format!("error: {e}")))?;
    let passes: Vec<String> = compiled.snapshots.iter().map(|s| s.pass.to_string()).collect();
    let _ = writeln!(
        err,
        "passes: {}",
        if passes.is_empty() { "none".to_string() } else { passes.join(", ") }
    );
    for note in compiled.notes() {
        let _ = writeln!(err, "note: {note}");
    }
    Ok(compiled)
}

fn cmd_compile(
    input: &Path,
    flags: &CompileFlags,
    intermediates: Option<&Path>,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let problem = load(input)?;
    let compiled = compile(&problem, flags, err)?;
    if let Some(dir) = intermediates {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        for (i, snap) in compiled.snapshots.iter().enumerate() {
            let path = dir.join(format!("{}_{}.json", i + 1, snap.pass));
            fs::write(&path, save_problem(&snap.problem)).map_err(|e| Failure::io(&path, e))?;
        }
    }
    write_to(output, &save_problem(&compiled.problem), out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    input: &Path,
    flags: &CompileFlags,
    config: &SearchConfig,
    show_compiled: bool,
    json: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let problem = load(input)?;
    let compiled = compile(&problem, flags, err)?;
    let started = Instant::now();
    let outcome = search::solve(&compiled.problem, config).map_err(|e| match e {
        SearchError::LimitExhausted { .. } => Failure(EXIT_TIMEOUT, format!("error: {e}")),
        e => Failure(EXIT_FAILURE, format!("error: {e}")),
    })?;
    let _ = writeln!(
        err,
        "expanded {} states, generated {}, {:.3} s",
        outcome.expanded,
        outcome.generated,
        started.elapsed().as_secs_f64()
    );
    let Some(plan) = outcome.plan else {
        return Err(Failure(EXIT_FAILURE, "no plan exists".into()));
    };
    let _ = writeln!(err, "plan length {}", plan.len());
    let plan = if show_compiled {
        plan
    } else {
        compiled
            .map_plan_back(&plan)
            .map_err(|e| Failure(EXIT_FAILURE, format!("error: {e}")))?
    };
    let text = if json {
        let mut s = serde_json::to_string_pretty(&plan.to_json()).expect("plans serialise");
        s.push('\n');
        s
    } else {
        plan.to_text()
    };
    write_to(output, &text, out)
}

fn parse_plan(text: &str) -> Result<Plan, Failure> {
    if text.trim_start().starts_with('[') {
        let json: serde_json::Value = serde_json::from_str(text).map_err(Failure::parse)?;
        Plan::from_json(&json).map_err(Failure::parse)
    } else {
        Plan::parse_text(text).map_err(Failure::parse)
    }
}

fn cmd_validate(
    input: &Path,
    plan_path: &Path,
    mode: UndefinednessMode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let problem = load(input)?;
    let plan = parse_plan(&read(plan_path)?)?;
    if mode == UndefinednessMode::Permissive && FeatureSet::of(&problem).has_arrays {
        let _ = writeln!(
            err,
            "note: permissive mode treats an out-of-range access in a step's effects as that step being inapplicable"
        );
    }
    let report = search::validate(&problem, &plan, mode).map_err(|e| Failure(EXIT_INVALID, format!("invalid: {e}")))?;
    let _ = writeln!(out, "{report}");
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure(EXIT_INVALID, String::new()))
    }
}

fn cmd_export(input: &Path, flags: &CompileFlags, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let problem = load(input)?;
    let compiled = compile(&problem, flags, err)?;
    let files = pddl::export(&compiled.problem).map_err(|e| Failure(EXIT_COMPILE, format!("error: {e}")))?;
    pddl::lint(&files.domain, &files.problem)
        .map_err(|e| Failure(EXIT_FAILURE, format!("error: exported PDDL fails the checker: {e}")))?;
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    for (name, text) in [("domain.pddl", &files.domain), ("problem.pddl", &files.problem)] {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        let _ = writeln!(out, "{}", path.display());
    }
    Ok(())
}

fn parse_board(board: &str) -> Result<Vec<Vec<i64>>, Failure> {
    let path = Path::new(board);
    if path.is_file() {
        return domains::parse_puzzle(&read(path)?).map_err(Failure::parse);
    }
    board
        .split('/')
        .map(|row| {
            row.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| Failure::parse(format!("bad tile `{t}`"))))
                .collect()
        })
        .collect()
}

fn cmd_gen(domain: &GenCommand, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let spec = match domain {
        GenCommand::Robot { n } => format::GenSpec::Robot { n: *n },
        GenCommand::Delivery => format::GenSpec::Delivery,
        GenCommand::Npuzzle { board } => format::GenSpec::Npuzzle {
            tiles: parse_board(board)?,
        },
        GenCommand::Rushhour { grid } => format::GenSpec::Rushhour { grid: grid.clone() },
        GenCommand::Plotting { spec } => {
            let s = domains::parse_plotting(&read(spec)?).map_err(Failure::parse)?;
            format::GenSpec::Plotting {
                colours: s.colours,
                grid: s.grid,
                max_remaining: s.max_remaining,
            }
        }
    };
    let problem = spec.generate().map_err(Failure::parse)?;
    write_to(output, &save_problem(&problem), out)
}
