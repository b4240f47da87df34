//! Watch the two engines march in lockstep.
//!
//! The verbatim engine's state projects onto the same shape the structured
//! engine maintains natively; at every scan boundary the projections must be
//! equal. This prints both projections side by side for the ten-node
//! classic.

use arborescence::structured::{self, aligned, ProjectedBoundaries, StructuredAudit};
use arborescence::{classic, verbatim};

fn main() {
    let inst = classic::ten_node();

    let mut v = ProjectedBoundaries::default();
    let v_sol = verbatim::solve_observed(&inst, &mut v);
    assert!(v.error.is_none(), "verbatim state projects at boundaries");

    let mut s = StructuredAudit::new(&inst);
    let s_sol = structured::solve_observed(&inst, &mut s);
    assert!(s.violations.is_empty());

    for ((vk, va), (sk, sa)) in v.boundaries.iter().zip(&s.boundaries) {
        assert_eq!(vk, sk);
        let mark = if aligned(va, sa) { "=" } else { "!" };
        println!(
            "k = {vk}: {mark} u {:?} components {:?}",
            va.u, va.components
        );
        assert!(aligned(va, sa), "boundary k = {vk} diverged");
    }

    println!();
    println!(
        "final: verbatim z = {}, structured z = {}, same tree: {}",
        v_sol.z,
        s_sol.z,
        v_sol.normalized_predecessor(inst.origin()) == s_sol.normalized_predecessor(inst.origin())
    );
}
