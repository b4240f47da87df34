//! Solve the classic ten-node instance and print the final table.

use arborescence::{classic, cli, verbatim};

fn main() {
    let inst = classic::ten_node();
    let sol = verbatim::solve(&inst);
    print!("{}", cli::solution_block(&sol));
    println!();
    println!(
        "origin {}, {} contractions absorbed into span labels up to {}",
        inst.origin(),
        sol.span.iter().max().unwrap() - inst.n() as i64,
        sol.span.iter().max().unwrap()
    );
}
