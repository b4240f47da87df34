//! Structured trace events for the verbatim engine.
//!
//! Every event names the statement label it was emitted from and carries the
//! scan column k plus enough payload to replay the run: feeding the events of
//! one solve through a fold reconstructs every working array between labels
//! (the golden-trace test does exactly that). Events serialize one JSON
//! object per line; the `label` field is the discriminator.
//!
//! Events fire after the labeled statement's effects are applied, so an
//! observer looking at the live state sees the post-statement world.

use crate::instance::Cost;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label")]
pub enum TraceEvent {
    /// Arrays initialized: duals zero, stars and bars empty, every node a
    /// singleton component.
    L2 { k: usize, n: usize, ss: i64 },
    /// Scan advanced to column k; `skipped` marks the origin column.
    L3 { k: usize, skipped: bool },
    /// Candidate search picked arc (i1, j1) entering the active component h
    /// at reduced cost du.
    L4 {
        k: usize,
        h: i64,
        du: Cost,
        i1: usize,
        j1: usize,
    },
    /// Duals of the `raised` columns (the active component, left to right)
    /// went up by du, making (i1, j1) tight.
    L5 {
        k: usize,
        h: i64,
        du: Cost,
        raised: Vec<usize>,
    },
    /// The backward trace closed a circuit: the active component and every
    /// marked component were relabeled to the fresh label ss.
    #[serde(rename = "L7-contract")]
    L7Contract {
        k: usize,
        ss: i64,
        relabeled: Vec<usize>,
    },
    /// One backward-trace step at node `at`: the nodes in `negated` had their
    /// component mark flipped on, `bar_written` records whether the candidate
    /// pair was stored at `at`, and the walk moved to `next`.
    #[serde(rename = "L8-step")]
    L8Step {
        k: usize,
        at: usize,
        negated: Vec<usize>,
        bar_written: bool,
        next: usize,
    },
    /// Root reached: component marks on the `restored` nodes were flipped
    /// back off before the exchange.
    L9 { k: usize, restored: Vec<usize> },
    /// One exchange-chain step: column `starred` now has predecessor
    /// `new_pred`, displacing `displaced`; bars equal to the chain's incoming
    /// pair were rewritten at the `rewritten` columns; the bar fetched at
    /// `starred` (before being overwritten) was (fetched_i, fetched_j).
    #[serde(rename = "L10-step")]
    L10Step {
        k: usize,
        starred: usize,
        new_pred: usize,
        displaced: usize,
        rewritten: Vec<usize>,
        fetched_i: usize,
        fetched_j: usize,
    },
    /// No finite arc enters the active component: infeasible, z set to M.
    L98 { k: usize, z: Cost },
    /// Scan complete; z is the sum of starred arc costs.
    L99 { k: usize, z: Cost },
}

impl TraceEvent {
    pub fn label(&self) -> &'static str {
        match self {
            TraceEvent::L2 { .. } => "L2",
            TraceEvent::L3 { .. } => "L3",
            TraceEvent::L4 { .. } => "L4",
            TraceEvent::L5 { .. } => "L5",
            TraceEvent::L7Contract { .. } => "L7-contract",
            TraceEvent::L8Step { .. } => "L8-step",
            TraceEvent::L9 { .. } => "L9",
            TraceEvent::L10Step { .. } => "L10-step",
            TraceEvent::L98 { .. } => "L98",
            TraceEvent::L99 { .. } => "L99",
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            TraceEvent::L2 { k, .. }
            | TraceEvent::L3 { k, .. }
            | TraceEvent::L4 { k, .. }
            | TraceEvent::L5 { k, .. }
            | TraceEvent::L7Contract { k, .. }
            | TraceEvent::L8Step { k, .. }
            | TraceEvent::L9 { k, .. }
            | TraceEvent::L10Step { k, .. }
            | TraceEvent::L98 { k, .. }
            | TraceEvent::L99 { k, .. } => k,
        }
    }

    /// One-line JSON record.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events always serialize")
    }
}
