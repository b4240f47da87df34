//! The two text formats, built and parsed in both directions.

use arborescence::parse::ParseInstance;
use arborescence::{verbatim, ProblemInstance};

fn main() {
    // Cost-matrix format: header `N ORIGIN [M]`, then N rows of N costs,
    // `inf` for a missing arc. The sentinel M is optional; left out, it
    // becomes one more than the largest finite cost.
    let rows = vec![
        vec![Some(0), Some(4), Some(9)],
        vec![None, Some(0), Some(2)],
        vec![None, Some(3), Some(0)],
    ];
    let inst = ProblemInstance::new(1, rows).unwrap();
    let text = inst.to_text();
    println!("cost-matrix file:\n{text}");
    assert_eq!(ProblemInstance::from_text(&text).unwrap(), inst);
    println!("sentinel chosen: {}", inst.sentinel());
    println!("z = {}\n", verbatim::solve(&inst).z);

    // Parse format: header `N ROOT`, a token line, then weighted arcs.
    let parse_text = "3 1\nROOT saw her\n1 2 5\n1 3 1\n2 3 4\n3 2 2\n";
    println!("parse file:\n{parse_text}");
    let parse: ParseInstance = parse_text.parse().unwrap();
    let decoded = parse.decode(arborescence::parse::Engine::Verbatim, 1000).unwrap();
    print!("{}", parse.export_heads(&decoded));
    println!("raw score {}", decoded.raw_score());
}
