//! Minimum directed spanning trees (arborescences) over dense integer cost
//! matrices, solved by the primal-dual procedure F. Bock published in 1971.
//!
//! The crate carries two interchangeable engines and the tooling to hold them
//! to account:
//!
//! * [`verbatim`]: a control-flow-faithful port of Bock's original Algol
//!   procedure. Every labeled statement of the listing is a step of an
//!   explicit phase machine, and each step can report itself as a structured
//!   trace event.
//! * [`structured`]: the same method rebuilt around named phases (candidate
//!   search, dual raise, trace, contract, exchange) over an abstract state
//!   with explicit component sets instead of sign-marked labels. Both engines
//!   agree step for step; [`structured::aligned`] makes that checkable.
//! * [`oracle`]: brute-force enumeration of all arborescences for small
//!   instances, used to audit both engines.
//! * [`parse`]: an adapter that turns max-weight dependency parsing into a
//!   min-cost instance and decodes head assignments exactly.
//!
//! Start with the crate examples: each major capability has a runnable
//! example (`cargo run --example classic_run`, `trace_events`,
//! `parse_decode`, `engine_alignment`, `oracle_audit`, `file_formats`).
//! A thin `arborescence` binary exposes the same capabilities as the
//! subcommands `solve`, `trace`, `parse`, and `check`.
//!
//! Nodes are numbered 1..=n everywhere, matching the tableau conventions the
//! algorithm was published with; 0 is the "no node" sentinel.

pub mod classic;
pub mod cli;
pub mod corpus;
pub mod instance;
pub mod oracle;
pub mod parse;
pub mod structured;
pub mod trace;
pub mod verbatim;

pub use instance::{Cost, ProblemInstance, Solution, Status};
