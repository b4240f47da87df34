//! Seeded random instances for cross-checking the engines at scale.
//!
//! Sizes stay inside the oracle's comfort zone and a tenth of the arcs are
//! infeasible, so the corpus regularly produces contractions, cost ties, and
//! outright infeasible instances. Every instance derives from its own seed,
//! so a failure report names a seed that regenerates the exact instance.

use crate::instance::{Cost, ProblemInstance};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shape of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusParams {
    pub count: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub seed: u64,
    pub cost_max: Cost,
    /// Probability that any given arc is infeasible.
    pub infeasible_share: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            count: 500,
            size_min: 2,
            size_max: 7,
            seed: 1971,
            cost_max: 20,
            infeasible_share: 0.1,
        }
    }
}

/// Generates `count` instances, pairing each with the seed that rebuilds it
/// (`params.seed + index`).
pub fn generate(params: &CorpusParams) -> Vec<(u64, ProblemInstance)> {
    (0..params.count)
        .map(|i| {
            let seed = params.seed.wrapping_add(i as u64);
            (seed, random_instance(seed, params))
        })
        .collect()
}

/// One instance from one seed. Node count, origin, and every arc draw from a
/// ChaCha8 stream keyed by the seed alone.
pub fn random_instance(seed: u64, params: &CorpusParams) -> ProblemInstance {
    assert!(
        params.size_min >= 1 && params.size_min <= params.size_max,
        "corpus sizes must satisfy 1 <= size_min <= size_max"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(params.size_min..=params.size_max);
    let origin = rng.random_range(1..=n);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(params.infeasible_share) {
                        None
                    } else {
                        Some(rng.random_range(0..=params.cost_max))
                    }
                })
                .collect()
        })
        .collect();
    ProblemInstance::new(origin, rows).expect("drawn costs satisfy construction invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let params = CorpusParams::default();
        let a = generate(&params);
        let b = generate(&params);
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn instances_respect_the_requested_shape() {
        let params = CorpusParams {
            count: 60,
            ..CorpusParams::default()
        };
        for (_, inst) in generate(&params) {
            assert!((params.size_min..=params.size_max).contains(&inst.n()));
            assert!((1..=inst.n()).contains(&inst.origin()));
            for i in 1..=inst.n() {
                for j in 1..=inst.n() {
                    if let Some(c) = inst.finite_cost(i, j) {
                        assert!((0..=params.cost_max).contains(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn default_corpus_spans_the_interesting_cases() {
        let instances = generate(&CorpusParams::default());
        let mut saw_infeasible_arc = false;
        let mut saw_unreachable_node = false;
        for (_, inst) in &instances {
            for j in 1..=inst.n() {
                if j == inst.origin() {
                    continue;
                }
                let mut any_in = false;
                for i in 1..=inst.n() {
                    if i == j {
                        continue;
                    }
                    match inst.finite_cost(i, j) {
                        Some(_) => any_in = true,
                        None => saw_infeasible_arc = true,
                    }
                }
                if !any_in {
                    saw_unreachable_node = true;
                }
            }
        }
        assert!(saw_infeasible_arc, "corpus never drew an infeasible arc");
        assert!(
            saw_unreachable_node,
            "corpus never produced an infeasible instance"
        );
    }
}
