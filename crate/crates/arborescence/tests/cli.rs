//! End-to-end runs of the binary: spawn it the way a user would and check
//! stdout, stderr, and exit codes against the documented contract.

use arborescence::cli::solution_block;
use arborescence::trace::TraceEvent;
use arborescence::{classic, structured, verbatim};
use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arborescence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn solve_prints_the_final_table_for_every_engine() {
    let verbatim_block = solution_block(&verbatim::solve(&classic::ten_node()));
    assert!(verbatim_block.contains("OPTIMUM SOLUTION") && verbatim_block.contains("Z = 87"));
    // The structured table differs only in representation conventions: its
    // component labels are canonical minima and the origin points at itself.
    let structured_block = solution_block(&structured::solve(&classic::ten_node()));
    assert!(structured_block.contains("Z = 87"));

    for (extra, expected) in [
        (&[][..], &verbatim_block),
        (&["--engine", "verbatim"][..], &verbatim_block),
        (&["--engine", "structured"][..], &structured_block),
        (&["--engine", "both"][..], &verbatim_block),
    ] {
        let mut args = vec!["solve", "fixtures/ten_node.txt"];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
        assert_eq!(&stdout(&out), expected, "args {args:?}");
        assert!(stderr(&out).is_empty(), "args {args:?}");
    }
}

#[test]
fn infeasible_instances_exit_two() {
    let out = run(&["solve", "fixtures/infeasible_three_node.txt", "--engine", "both"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.starts_with("INFEASIBLE\nZ = 5\n"), "got: {text}");
}

#[test]
fn unreadable_or_malformed_files_exit_three() {
    let out = run(&["solve", "no/such/file.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("no/such/file.txt"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, "2 1\n0 bad\n0 0\n").unwrap();
    let out = run(&["solve", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("line 2, column 3"), "got: {err}");
    assert!(err.contains("found `bad`"), "got: {err}");
}

#[test]
fn usage_errors_exit_three_but_help_exits_zero() {
    let out = run(&["solve"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("solve"));
}

#[test]
fn trace_writes_replayable_records_and_the_same_table() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("run.jsonl");
    let out = run(&[
        "trace",
        "fixtures/ten_node.txt",
        "--trace-out",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), stdout(&run(&["solve", "fixtures/ten_node.txt"])));

    let text = std::fs::read_to_string(&trace_path).unwrap();
    let events: Vec<TraceEvent> = text
        .lines()
        .map(|line| serde_json::from_str(line).expect("every record is a trace event"))
        .collect();
    assert_eq!(events.len(), 87);
    assert!(matches!(events[0], TraceEvent::L2 { .. }));
    assert!(matches!(events.last(), Some(TraceEvent::L99 { z: 87, .. })));

    // Without --trace-out the records precede the table on stdout.
    let out = run(&["trace", "fixtures/ten_node.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("{\"label\":\"L2\""));
    assert!(stdout(&out).ends_with(&stdout(&run(&["solve", "fixtures/ten_node.txt"]))));
}

#[test]
fn trace_both_interleaves_boundary_records_from_each_engine() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("run.jsonl");
    let out = run(&[
        "trace",
        "fixtures/ten_node.txt",
        "--engine",
        "both",
        "--trace-out",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&trace_path).unwrap();
    let records: Vec<serde_json::Value> = text
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(records.len(), 20);
    for (idx, rec) in records.iter().enumerate() {
        let engine = if idx % 2 == 0 { "verbatim" } else { "structured" };
        assert_eq!(rec["engine"], engine, "record {idx}");
        assert_eq!(rec["k"], idx as u64 / 2, "record {idx}");
        assert!(rec["components"].is_array(), "record {idx}");
    }
    // Paired records carry identical projected states.
    for pair in records.chunks(2) {
        let (mut v, mut s) = (pair[0].clone(), pair[1].clone());
        v["engine"].take();
        s["engine"].take();
        assert_eq!(v, s);
    }
}

#[test]
fn parse_emits_heads_on_stdout_and_the_score_on_stderr() {
    for engine in ["verbatim", "structured", "both"] {
        let out = run(&["parse", "fixtures/book_that_flight.parse", "--engine", engine]);
        assert_eq!(out.status.code(), Some(0), "engine {engine}");
        assert_eq!(stdout(&out), "2 Book 1\n3 that 4\n4 flight 2\n");
        assert_eq!(
            stderr(&out),
            "score = 26000 (raw 26)  cost = 10000  q_max = 12000  scale = 1000\n"
        );
    }

    let out = run(&["parse", "fixtures/book_that_flight.parse", "--scale", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stderr(&out),
        "score = 260 (raw 26)  cost = 100  q_max = 120  scale = 10\n"
    );
}

#[test]
fn headless_tokens_make_parsing_infeasible() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "2 1\nROOT stranded\n").unwrap();
    let out = run(&["parse", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no spanning head assignment exists"));
}

#[test]
fn check_cross_validates_the_corpus() {
    let out = run(&["check", "--corpus-count", "25"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("checked 27 instances (2 classic + 25 random"),
        "got: {text}"
    );
    assert!(text.contains("27 passed, 0 failed"), "got: {text}");

    let out = run(&["check", "--size-min", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let first = run(&["solve", "fixtures/ten_node.txt"]);
    let second = run(&["solve", "fixtures/ten_node.txt"]);
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = run(&[
            "trace",
            "fixtures/book_that_flight_costs.txt",
            "--trace-out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap()
    );
}
