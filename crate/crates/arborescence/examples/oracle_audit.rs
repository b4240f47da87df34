//! Cross-check both engines against exhaustive enumeration on a random
//! corpus, printing the full audit for one instance and a tally for the
//! rest.

use arborescence::corpus::{self, CorpusParams};
use arborescence::oracle;

fn main() {
    let params = CorpusParams {
        count: 40,
        seed: 7,
        ..CorpusParams::default()
    };

    let mut passed = 0;
    for (idx, (seed, inst)) in corpus::generate(&params).into_iter().enumerate() {
        let report = oracle::check_equivalence(&inst, oracle::DEFAULT_BOUND);
        if idx == 0 {
            println!("audit of the first instance (seed {seed}):");
            println!("{report}");
            println!();
        }
        if report.passes() {
            passed += 1;
        } else {
            println!("seed {seed} FAILED:\n{report}");
        }
    }
    println!("{passed}/{} instances fully cross-checked", params.count);
}
