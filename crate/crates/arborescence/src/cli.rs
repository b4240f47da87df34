//! Command-line front end.
//!
//! Four subcommands: `solve` prints the solution table for a cost-matrix
//! file, `trace` additionally streams per-label records as JSON lines,
//! `parse` decodes a parse file into a head assignment, and `check`
//! cross-checks both engines against the brute-force oracle on the classic
//! instances plus a seeded random corpus.
//!
//! Exit codes: 0 success (optimum found, or every check passed), 2 the
//! instance is infeasible, 3 bad input (unreadable file, malformed format,
//! bad flags), 4 a cross-check failed (engines or oracle disagree).

use crate::classic;
use crate::corpus::{self, CorpusParams};
use crate::instance::{ProblemInstance, Solution, Status};
use crate::oracle;
use crate::parse::{self, DecodeError, HeadAssignment, ParseInstance};
use crate::structured::{self, AbstractState, BoundaryRecord, StructuredObserver, StructuredState};
use crate::verbatim;
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "arborescence",
    version,
    about = "Minimum arborescence solver with two provably aligned engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Which engine answers. `both` runs the pair and fails (exit 4) unless
/// they agree; printed state then comes from the verbatim run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Verbatim,
    Structured,
    Both,
}

impl EngineChoice {
    fn single(self) -> Option<parse::Engine> {
        match self {
            EngineChoice::Verbatim => Some(parse::Engine::Verbatim),
            EngineChoice::Structured => Some(parse::Engine::Structured),
            EngineChoice::Both => None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a cost-matrix instance and print the solution table.
    Solve {
        /// Instance file: header `N ORIGIN [M]`, then N rows of N costs
        /// (`inf` marks a missing arc).
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineChoice::Verbatim)]
        engine: EngineChoice,
    },
    /// Solve while streaming trace records as JSON lines.
    ///
    /// The verbatim engine emits one record per procedure label; the
    /// structured engine emits one projected state per scan boundary;
    /// `both` interleaves the two engines' boundary records for diffing.
    Trace {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineChoice::Verbatim)]
        engine: EngineChoice,
        /// Write the records here instead of stdout.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Decode a parse file into its maximum-weight head assignment.
    ///
    /// Prints one `index surface head` line per non-root token; the score
    /// summary goes to stderr.
    Parse {
        /// Parse file: `N ROOT`, a token line, then `HEAD DEP WEIGHT` arcs.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineChoice::Verbatim)]
        engine: EngineChoice,
        /// Weight quantization factor (weights keep 1/scale resolution).
        #[arg(long, default_value_t = parse::DEFAULT_SCALE)]
        scale: u32,
    },
    /// Cross-check the engines against each other and the oracle.
    ///
    /// Runs the classic instances plus a seeded random corpus; every
    /// failure prints its report and the offending instance to stderr.
    Check {
        #[arg(long, default_value_t = 500)]
        corpus_count: usize,
        #[arg(long, default_value_t = 1971)]
        corpus_seed: u64,
        #[arg(long, default_value_t = 2)]
        size_min: usize,
        #[arg(long, default_value_t = 7)]
        size_max: usize,
        /// Skip the brute-force legs for instances above this size.
        #[arg(long, default_value_t = oracle::DEFAULT_BOUND)]
        oracle_bound: usize,
    },
}

/// Entry point for the binary.
pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

/// Same as [`run`] with explicit arguments, for in-process testing.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let failed = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if failed { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match cli.command {
        Command::Solve { file, engine } => cmd_solve(&file, engine),
        Command::Trace {
            file,
            engine,
            trace_out,
        } => cmd_trace(&file, engine, trace_out.as_deref()),
        Command::Parse {
            file,
            engine,
            scale,
        } => cmd_parse(&file, engine, scale),
        Command::Check {
            corpus_count,
            corpus_seed,
            size_min,
            size_max,
            oracle_bound,
        } => cmd_check(corpus_count, corpus_seed, size_min, size_max, oracle_bound),
    }
}

/// Renders a solution the way the procedure prints it: the status line,
/// the objective, then the final arrays as aligned rows.
pub fn solution_block(sol: &Solution) -> String {
    let headline = match sol.status {
        Status::Optimum => "OPTIMUM SOLUTION",
        Status::Infeasible => "INFEASIBLE",
    };
    let rows: Vec<(&str, Vec<String>)> = vec![
        ("J", (1..=sol.n()).map(|j| j.to_string()).collect()),
        ("U1[J]", sol.dual.iter().map(|v| v.to_string()).collect()),
        (
            "I STAR[J]",
            sol.predecessor.iter().map(|v| v.to_string()).collect(),
        ),
        ("I BAR[J]", sol.i_bar.iter().map(|v| v.to_string()).collect()),
        ("J BAR[J]", sol.j_bar.iter().map(|v| v.to_string()).collect()),
        ("SPAN[J]", sol.span.iter().map(|v| v.to_string()).collect()),
    ];
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(1);
    let cell_w = rows
        .iter()
        .flat_map(|(_, cells)| cells.iter().map(String::len))
        .max()
        .unwrap_or(1);
    let mut out = format!("{headline}\nZ = {}\n", sol.z);
    for (label, cells) in rows {
        out.push_str(&format!("{label:>label_w$}"));
        for c in cells {
            out.push_str(&format!("  {c:>cell_w$}"));
        }
        out.push('\n');
    }
    out
}

fn input_error(path: &Path, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}: {err}", path.display());
    ExitCode::from(EXIT_INPUT)
}

fn load_instance(path: &Path) -> Result<ProblemInstance, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| input_error(path, e))?;
    text.parse::<ProblemInstance>()
        .map_err(|e| input_error(path, e))
}

fn exit_for(sol: &Solution) -> ExitCode {
    match sol.status {
        Status::Optimum => ExitCode::from(EXIT_OK),
        Status::Infeasible => ExitCode::from(EXIT_INFEASIBLE),
    }
}

fn final_answers_agree(inst: &ProblemInstance, v: &Solution, s: &Solution) -> bool {
    v.status == s.status
        && v.z == s.z
        && (v.status != Status::Optimum
            || v.normalized_predecessor(inst.origin()) == s.normalized_predecessor(inst.origin()))
}

fn solve_with(inst: &ProblemInstance, engine: EngineChoice) -> (Solution, Option<String>) {
    match engine {
        EngineChoice::Verbatim => (verbatim::solve(inst), None),
        EngineChoice::Structured => (structured::solve(inst), None),
        EngineChoice::Both => {
            let v = verbatim::solve(inst);
            let s = structured::solve(inst);
            let note = (!final_answers_agree(inst, &v, &s)).then(|| {
                format!(
                    "engines disagree: verbatim {} z={}, structured {} z={}",
                    v.status, v.z, s.status, s.z
                )
            });
            (v, note)
        }
    }
}

fn cmd_solve(path: &Path, engine: EngineChoice) -> ExitCode {
    let inst = match load_instance(path) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let (sol, note) = solve_with(&inst, engine);
    print!("{}", solution_block(&sol));
    if let Some(msg) = note {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_MISMATCH);
    }
    exit_for(&sol)
}

/// Structured observer that keeps one projected state per boundary.
#[derive(Default)]
struct Boundaries(Vec<(usize, AbstractState)>);

impl StructuredObserver for Boundaries {
    fn boundary(&mut self, k: usize, state: &StructuredState) {
        self.0.push((k, state.project()));
    }
}

fn record_line(engine: &'static str, k: usize, state: AbstractState) -> String {
    serde_json::to_string(&BoundaryRecord { engine, k, state }).expect("boundary records serialize")
}

fn write_trace<W: io::Write>(
    inst: &ProblemInstance,
    engine: EngineChoice,
    mut w: W,
) -> io::Result<(Solution, Option<String>)> {
    match engine {
        EngineChoice::Verbatim => {
            let mut sink = verbatim::JsonLines::new(&mut w);
            let sol = verbatim::solve_observed(inst, &mut sink);
            let (_, err) = sink.into_inner();
            if let Some(e) = err {
                return Err(e);
            }
            w.flush()?;
            Ok((sol, None))
        }
        EngineChoice::Structured => {
            let mut bounds = Boundaries::default();
            let sol = structured::solve_observed(inst, &mut bounds);
            for (k, state) in bounds.0 {
                writeln!(w, "{}", record_line("structured", k, state))?;
            }
            w.flush()?;
            Ok((sol, None))
        }
        EngineChoice::Both => {
            let mut vb = structured::ProjectedBoundaries::default();
            let v = verbatim::solve_observed(inst, &mut vb);
            let mut sb = Boundaries::default();
            let s = structured::solve_observed(inst, &mut sb);
            let mut note = (!final_answers_agree(inst, &v, &s)).then(|| {
                format!(
                    "engines disagree: verbatim {} z={}, structured {} z={}",
                    v.status, v.z, s.status, s.z
                )
            });
            if let Some(e) = vb.error {
                note = Some(format!("verbatim state would not project: {e}"));
            }
            let mut vi = vb.boundaries.into_iter();
            let mut si = sb.0.into_iter();
            loop {
                match (vi.next(), si.next()) {
                    (None, None) => break,
                    (v_rec, s_rec) => {
                        if let Some((k, state)) = v_rec {
                            writeln!(w, "{}", record_line("verbatim", k, state))?;
                        }
                        if let Some((k, state)) = s_rec {
                            writeln!(w, "{}", record_line("structured", k, state))?;
                        }
                    }
                }
            }
            w.flush()?;
            Ok((v, note))
        }
    }
}

fn cmd_trace(path: &Path, engine: EngineChoice, trace_out: Option<&Path>) -> ExitCode {
    let inst = match load_instance(path) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let result = match trace_out {
        Some(out) => match fs::File::create(out) {
            Ok(f) => write_trace(&inst, engine, io::BufWriter::new(f)),
            Err(e) => return input_error(out, e),
        },
        None => write_trace(&inst, engine, io::stdout().lock()),
    };
    let (sol, note) = match result {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: writing trace: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    print!("{}", solution_block(&sol));
    if let Some(msg) = note {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_MISMATCH);
    }
    exit_for(&sol)
}

fn cmd_parse(path: &Path, engine: EngineChoice, scale: u32) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(path, e),
    };
    let pinst = match text.parse::<ParseInstance>() {
        Ok(p) => p,
        Err(e) => return input_error(path, e),
    };
    let decoded: Result<(HeadAssignment, Option<String>), DecodeError> = match engine.single() {
        Some(eng) => pinst.decode(eng, scale).map(|a| (a, None)),
        None => {
            let v = pinst.decode(parse::Engine::Verbatim, scale);
            let s = pinst.decode(parse::Engine::Structured, scale);
            match (v, s) {
                (Ok(a), Ok(b)) => {
                    let note = (a != b).then(|| {
                        format!(
                            "engines disagree: verbatim heads {:?} vs structured heads {:?}",
                            a.head, b.head
                        )
                    });
                    Ok((a, note))
                }
                (Err(e), Err(_)) => Err(e),
                (Ok(_), Err(e)) => {
                    eprintln!("error: engines disagree: structured failed: {e}");
                    return ExitCode::from(EXIT_MISMATCH);
                }
                (Err(e), Ok(_)) => {
                    eprintln!("error: engines disagree: verbatim failed: {e}");
                    return ExitCode::from(EXIT_MISMATCH);
                }
            }
        }
    };
    let (assignment, note) = match decoded {
        Ok(pair) => pair,
        Err(e @ DecodeError::Infeasible { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
        Err(e) => return input_error(path, e),
    };
    print!("{}", pinst.export_heads(&assignment));
    eprintln!(
        "score = {} (raw {})  cost = {}  q_max = {}  scale = {}",
        assignment.score,
        assignment.raw_score(),
        assignment.cost,
        assignment.q_max,
        assignment.scale
    );
    if let Some(msg) = note {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_MISMATCH);
    }
    ExitCode::from(EXIT_OK)
}

fn cmd_check(
    count: usize,
    seed: u64,
    size_min: usize,
    size_max: usize,
    oracle_bound: usize,
) -> ExitCode {
    if size_min < 1 || size_min > size_max {
        eprintln!("error: sizes must satisfy 1 <= size-min <= size-max");
        return ExitCode::from(EXIT_INPUT);
    }
    let params = CorpusParams {
        count,
        size_min,
        size_max,
        seed,
        ..CorpusParams::default()
    };
    let mut cases: Vec<(String, ProblemInstance)> = vec![
        ("classic ten-node".into(), classic::ten_node()),
        (
            "classic book-that-flight".into(),
            classic::book_that_flight_costs(),
        ),
    ];
    cases.extend(
        corpus::generate(&params)
            .into_iter()
            .map(|(seed, inst)| (format!("seed {seed}"), inst)),
    );
    let total = cases.len();
    let mut failed = 0usize;
    for (label, inst) in &cases {
        let report = oracle::check_equivalence(inst, oracle_bound);
        if !report.passes() {
            failed += 1;
            eprintln!("FAIL {label}\n{report}\ninstance:\n{}", inst.to_text());
        }
    }
    println!(
        "checked {total} instances (2 classic + {} random, corpus seed {seed}, \
         sizes {size_min}..={size_max}, oracle bound {oracle_bound})",
        total - 2
    );
    println!("{} passed, {failed} failed", total - failed);
    ExitCode::from(if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}
