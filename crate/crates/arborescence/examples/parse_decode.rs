//! Decode a sentence's maximum-weight dependency tree.
//!
//! Arc weights are scores to maximize; the adapter quantizes them, flips
//! them into costs, solves the minimization, and proves the affine identity
//! `cost = (n - 1) * q_max - score` on the way back.

use arborescence::parse::{Engine, ParseInstance};

const SENTENCE: &str = "\
4 1
ROOT Book that flight
1 2 12
1 3 4
1 4 4
2 3 5
2 4 7
3 2 6
3 4 8
4 2 5
4 3 7
";

fn main() {
    let inst: ParseInstance = SENTENCE.parse().expect("well-formed parse file");
    let decoded = inst.decode(Engine::Verbatim, 1000).expect("a tree exists");

    print!("{}", inst.export_heads(&decoded));
    println!(
        "score {} (raw {}), cost {}, q_max {}",
        decoded.score,
        decoded.raw_score(),
        decoded.cost,
        decoded.q_max
    );

    let n = inst.n() as i64;
    assert_eq!(decoded.cost, (n - 1) * decoded.q_max - decoded.score);
    println!(
        "identity: {} = {} * {} - {}",
        decoded.cost,
        n - 1,
        decoded.q_max,
        decoded.score
    );
}
