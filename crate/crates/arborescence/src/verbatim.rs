//! Control-flow-faithful port of Bock's 1971 Algol procedure.
//!
//! The original is a single procedure whose statements are reachable by
//! numeric labels. This engine keeps that structure honest: every working
//! variable of the listing lives in [`VerbatimState`] under its original
//! name, each labeled block is one method, and the solve loop wires them
//! together exactly as the gotos do:
//!
//! ```text
//! L2  initialize            L3  advance the scan column k
//! L4  candidate search      L5  dual update
//! L6-L8  backward trace     L7  contract (circuit found)
//! L9-L10 restore + exchange L98 infeasible   L99 objective
//! ```
//!
//! Arrays are 1-based with slot 0 as scratch, mirroring the Algol's world;
//! node 0 means "none". Every labeled statement can report itself as a
//! [`TraceEvent`] through a [`VerbatimObserver`], which also receives a
//! callback at each scan boundary (after L2 and each time control returns to
//! L3 with a column completed).

use crate::instance::{Cost, ProblemInstance, Solution, Status};
use crate::trace::TraceEvent;
use std::io;

/// Receives trace events and scan-boundary callbacks during a solve.
///
/// Events arrive after the labeled statement's effects are applied, with the
/// live state alongside, so implementations can audit invariants without
/// replaying anything.
pub trait VerbatimObserver {
    fn event(&mut self, _event: &TraceEvent, _state: &VerbatimState) {}
    fn boundary(&mut self, _state: &VerbatimState) {}
}

/// Observer that ignores everything.
pub struct Noop;

impl VerbatimObserver for Noop {}

/// The procedure's working variables, names preserved from the listing.
///
/// All arrays have length n + 1, indexed by node; `i_star[j]` is the starred
/// predecessor of j (0 = none), `i_bar`/`j_bar` hold the deferred-exchange
/// pair recorded at j, and `span[j]` is j's component label (negative while
/// marked during a backward trace). `ss` is the next fresh component label,
/// `k` the scan column, and the rest are the listing's temporaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbatimState {
    pub n: usize,
    pub origin: usize,
    pub u1: Vec<Cost>,
    pub i_star: Vec<usize>,
    pub i_bar: Vec<usize>,
    pub j_bar: Vec<usize>,
    pub span: Vec<i64>,
    pub ss: i64,
    pub k: usize,
    pub z: Cost,
    pub du: Cost,
    pub h: i64,
    pub h1: i64,
    pub i1: usize,
    pub j1: usize,
    pub i2: usize,
    pub j2: usize,
    pub j_cursor: usize,
}

/// Result of one candidate search: the entering arc and its reduced cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub du: Cost,
    pub i1: usize,
    pub j1: usize,
}

/// How a backward trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOutcome {
    /// The walk re-entered the active component; contraction follows.
    Circuit,
    /// The walk reached an unstarred node; restore and exchange follow.
    RootReached,
}

impl VerbatimState {
    /// L2: duals zero, stars and bars empty, every node its own component.
    pub fn new(inst: &ProblemInstance) -> Self {
        let n = inst.n();
        let mut span = vec![0i64; n + 1];
        for (j, s) in span.iter_mut().enumerate() {
            *s = j as i64;
        }
        VerbatimState {
            n,
            origin: inst.origin(),
            u1: vec![0; n + 1],
            i_star: vec![0; n + 1],
            i_bar: vec![0; n + 1],
            j_bar: vec![0; n + 1],
            span,
            ss: n as i64,
            k: 0,
            z: 0,
            du: 0,
            h: 0,
            h1: 0,
            i1: 0,
            j1: 0,
            i2: 0,
            j2: 0,
            j_cursor: 0,
        }
    }

    /// L4: scan the active component's columns (ascending), and for each the
    /// rows outside the component (ascending), keeping the first strict
    /// minimizer of the reduced cost c(i, j) - u1[j]. Returns `None` when no
    /// finite arc enters the component.
    pub fn candidate_search(&mut self, inst: &ProblemInstance) -> Option<Candidate> {
        let m = inst.sentinel();
        self.du = m;
        self.h = self.span[self.k];
        for j in 1..=self.k {
            if self.span[j] != self.h {
                continue;
            }
            for i in 1..=self.n {
                if self.span[i] != self.h
                    && inst.cost(i, j) < m
                    && inst.cost(i, j) - self.u1[j] < self.du
                {
                    self.du = inst.cost(i, j) - self.u1[j];
                    self.i1 = i;
                    self.j1 = j;
                }
            }
        }
        (self.du != m).then_some(Candidate {
            du: self.du,
            i1: self.i1,
            j1: self.j1,
        })
    }

    /// L5: raise the duals of the active component's columns by du, making
    /// the selected arc tight. Returns the raised columns.
    pub fn dual_update(&mut self) -> Vec<usize> {
        let mut raised = Vec::new();
        for j in 1..=self.k {
            if self.span[j] == self.h {
                self.u1[j] += self.du;
                raised.push(j);
            }
        }
        raised
    }

    /// L6-L8: walk starred predecessors from the candidate's tail. Each step
    /// marks the visited node's component (negating its span labels), stores
    /// the candidate pair at the node if its bar is empty, and follows the
    /// star. Stops with [`TraceOutcome::Circuit`] on re-entering the active
    /// component, or [`TraceOutcome::RootReached`] at an unstarred node.
    pub fn backward_trace(&mut self, obs: &mut dyn VerbatimObserver) -> TraceOutcome {
        self.j_cursor = self.i1;
        loop {
            if self.span[self.j_cursor] == self.h {
                return TraceOutcome::Circuit;
            }
            if self.i_star[self.j_cursor] == 0 {
                return TraceOutcome::RootReached;
            }
            let at = self.j_cursor;
            let mut negated = Vec::new();
            if self.span[at] > 0 {
                self.h1 = self.span[at];
                for j2 in 1..=self.k {
                    if self.span[j2] == self.h1 {
                        self.span[j2] = -self.h1;
                        negated.push(j2);
                    }
                }
            }
            let bar_written = self.i_bar[at] == 0;
            if bar_written {
                self.i_bar[at] = self.i1;
                self.j_bar[at] = self.j1;
            }
            self.j_cursor = self.i_star[at];
            let ev = TraceEvent::L8Step {
                k: self.k,
                at,
                negated,
                bar_written,
                next: self.j_cursor,
            };
            obs.event(&ev, self);
        }
    }

    /// L7: merge the active component and every marked one under a fresh
    /// label. Returns the relabeled nodes; the caller re-enters L4, which
    /// re-reads the active label from span[k].
    pub fn contract(&mut self) -> Vec<usize> {
        self.ss += 1;
        let mut relabeled = Vec::new();
        for j2 in 1..=self.k {
            if self.span[j2] == self.h || self.span[j2] < 0 {
                self.span[j2] = self.ss;
                relabeled.push(j2);
            }
        }
        relabeled
    }

    /// L9-L10: flip trace marks back off, then run the exchange chain. Each
    /// chain step stars the pending column with the pending predecessor,
    /// rewrites every bar equal to the pending pair, and continues with the
    /// pair fetched from the starred column's bar until a step displaces
    /// nothing.
    pub fn restore_and_exchange(&mut self, obs: &mut dyn VerbatimObserver) {
        let mut restored = Vec::new();
        for j2 in 1..=self.k {
            if self.span[j2] < 0 {
                self.span[j2] = -self.span[j2];
                restored.push(j2);
            }
        }
        self.i2 = 0;
        self.j2 = 0;
        let ev = TraceEvent::L9 {
            k: self.k,
            restored,
        };
        obs.event(&ev, self);

        loop {
            let mut rewritten = Vec::new();
            for j in 1..=self.k {
                if self.i_bar[j] == self.i1 && self.j_bar[j] == self.j1 {
                    self.i_bar[j] = self.i2;
                    self.j_bar[j] = self.j2;
                    rewritten.push(j);
                }
            }
            let fetched_i = self.i_bar[self.j1];
            let fetched_j = self.j_bar[self.j1];
            self.i_bar[self.j1] = self.i2;
            self.j_bar[self.j1] = self.j2;
            let displaced = self.i_star[self.j1];
            self.i_star[self.j1] = self.i1;
            self.i2 = displaced;
            let ev = TraceEvent::L10Step {
                k: self.k,
                starred: self.j1,
                new_pred: self.i1,
                displaced,
                rewritten,
                fetched_i,
                fetched_j,
            };
            obs.event(&ev, self);
            if displaced == 0 {
                return;
            }
            self.j2 = self.j1;
            self.i1 = fetched_i;
            self.j1 = fetched_j;
        }
    }

    /// L99: sum the starred arc costs over the non-origin columns into z.
    pub fn objective(&mut self, inst: &ProblemInstance) -> Cost {
        for j in 1..=self.n {
            if j != self.origin {
                self.z += inst.cost(self.i_star[j], j);
            }
        }
        self.z
    }

    /// Packs the final arrays into the public solution shape (node j moves
    /// from slot j to position j - 1).
    pub fn into_solution(self, status: Status) -> Solution {
        Solution {
            status,
            z: self.z,
            predecessor: self.i_star[1..].to_vec(),
            dual: self.u1[1..].to_vec(),
            i_bar: self.i_bar[1..].to_vec(),
            j_bar: self.j_bar[1..].to_vec(),
            span: self.span[1..].to_vec(),
        }
    }
}

/// Solves the instance, reporting nothing along the way.
pub fn solve(inst: &ProblemInstance) -> Solution {
    solve_observed(inst, &mut Noop)
}

/// Solves the instance, reporting every labeled step and scan boundary.
pub fn solve_observed(inst: &ProblemInstance, obs: &mut dyn VerbatimObserver) -> Solution {
    let mut st = VerbatimState::new(inst);
    let ev = TraceEvent::L2 {
        k: 0,
        n: st.n,
        ss: st.ss,
    };
    obs.event(&ev, &st);
    obs.boundary(&st);

    loop {
        if st.k == st.n {
            let z = st.objective(inst);
            let ev = TraceEvent::L99 { k: st.k, z };
            obs.event(&ev, &st);
            return st.into_solution(Status::Optimum);
        }
        st.k += 1;
        let skipped = st.k == st.origin;
        let ev = TraceEvent::L3 { k: st.k, skipped };
        obs.event(&ev, &st);
        if skipped {
            continue;
        }
        loop {
            match st.candidate_search(inst) {
                None => {
                    st.z = inst.sentinel();
                    let ev = TraceEvent::L98 { k: st.k, z: st.z };
                    obs.event(&ev, &st);
                    return st.into_solution(Status::Infeasible);
                }
                Some(c) => {
                    let ev = TraceEvent::L4 {
                        k: st.k,
                        h: st.h,
                        du: c.du,
                        i1: c.i1,
                        j1: c.j1,
                    };
                    obs.event(&ev, &st);
                }
            }
            let raised = st.dual_update();
            let ev = TraceEvent::L5 {
                k: st.k,
                h: st.h,
                du: st.du,
                raised,
            };
            obs.event(&ev, &st);
            match st.backward_trace(obs) {
                TraceOutcome::Circuit => {
                    let relabeled = st.contract();
                    let ev = TraceEvent::L7Contract {
                        k: st.k,
                        ss: st.ss,
                        relabeled,
                    };
                    obs.event(&ev, &st);
                }
                TraceOutcome::RootReached => {
                    st.restore_and_exchange(obs);
                    break;
                }
            }
        }
        obs.boundary(&st);
    }
}

/// Collects every event of a run.
#[derive(Debug, Default)]
pub struct EventLog {
    pub events: Vec<TraceEvent>,
}

impl VerbatimObserver for EventLog {
    fn event(&mut self, event: &TraceEvent, _state: &VerbatimState) {
        self.events.push(event.clone());
    }
}

/// Clones the full state at every scan boundary.
#[derive(Debug, Default)]
pub struct BoundaryLog {
    pub states: Vec<VerbatimState>,
}

impl VerbatimObserver for BoundaryLog {
    fn boundary(&mut self, state: &VerbatimState) {
        self.states.push(state.clone());
    }
}

/// Streams events as JSON lines; the first write error is kept, after which
/// the sink goes quiet.
pub struct JsonLines<W: io::Write> {
    out: W,
    pub error: Option<io::Error>,
}

impl<W: io::Write> JsonLines<W> {
    pub fn new(out: W) -> Self {
        JsonLines { out, error: None }
    }

    pub fn into_inner(self) -> (W, Option<io::Error>) {
        (self.out, self.error)
    }
}

impl<W: io::Write> VerbatimObserver for JsonLines<W> {
    fn event(&mut self, event: &TraceEvent, _state: &VerbatimState) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = writeln!(self.out, "{}", event.to_json_line()) {
            self.error = Some(e);
        }
    }
}

/// Forwards to two observers, so a run can stream and audit at once.
pub struct Tee<'a, A: VerbatimObserver, B: VerbatimObserver>(pub &'a mut A, pub &'a mut B);

impl<A: VerbatimObserver, B: VerbatimObserver> VerbatimObserver for Tee<'_, A, B> {
    fn event(&mut self, event: &TraceEvent, state: &VerbatimState) {
        self.0.event(event, state);
        self.1.event(event, state);
    }

    fn boundary(&mut self, state: &VerbatimState) {
        self.0.boundary(state);
        self.1.boundary(state);
    }
}

/// Audits the run invariants as the events stream by, collecting one message
/// per violation:
///
/// * the origin is never starred, raised, or relabeled;
/// * bars pair up (tail and head are zero or nonzero together);
/// * duals never decrease, and each L5 leaves the selected arc tight;
/// * spans are all positive at every scan boundary;
/// * the exchange phase never touches duals;
/// * component labels stay at or below 2n.
pub struct InvariantChecker<'a> {
    inst: &'a ProblemInstance,
    last_u1: Option<Vec<Cost>>,
    u1_at_l9: Option<Vec<Cost>>,
    pub violations: Vec<String>,
}

impl<'a> InvariantChecker<'a> {
    pub fn new(inst: &'a ProblemInstance) -> Self {
        InvariantChecker {
            inst,
            last_u1: None,
            u1_at_l9: None,
            violations: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn check_always(&mut self, state: &VerbatimState) {
        let o = state.origin;
        if state.span[o] != o as i64 || state.i_star[o] != 0 || state.u1[o] != 0 {
            self.violations.push(format!(
                "origin isolation broken at k={}: span={}, i_star={}, u1={}",
                state.k, state.span[o], state.i_star[o], state.u1[o]
            ));
        }
        for j in 1..=state.n {
            if (state.i_bar[j] == 0) != (state.j_bar[j] == 0) {
                self.violations.push(format!(
                    "bar pairing broken at k={}, node {}: ({}, {})",
                    state.k, j, state.i_bar[j], state.j_bar[j]
                ));
            }
        }
        if let Some(last) = &self.last_u1 {
            for j in 1..=state.n {
                if state.u1[j] < last[j] {
                    self.violations.push(format!(
                        "dual decreased at k={}, node {}: {} -> {}",
                        state.k, j, last[j], state.u1[j]
                    ));
                }
            }
        }
        self.last_u1 = Some(state.u1.clone());
        if state.ss > 2 * state.n as i64 {
            self.violations
                .push(format!("component label {} exceeds 2n", state.ss));
        }
    }
}

impl VerbatimObserver for InvariantChecker<'_> {
    fn event(&mut self, event: &TraceEvent, state: &VerbatimState) {
        self.check_always(state);
        match event {
            TraceEvent::L5 { du, .. } => {
                if *du < 0 {
                    self.violations
                        .push(format!("negative dual step {} at k={}", du, state.k));
                }
                let reduced = self.inst.cost(state.i1, state.j1) - state.u1[state.j1];
                if reduced != 0 {
                    self.violations.push(format!(
                        "selected arc ({}, {}) not tight after L5 at k={}: reduced cost {}",
                        state.i1, state.j1, state.k, reduced
                    ));
                }
            }
            TraceEvent::L9 { .. } => {
                self.u1_at_l9 = Some(state.u1.clone());
            }
            TraceEvent::L10Step { displaced, .. } => {
                if *displaced == 0 {
                    match self.u1_at_l9.take() {
                        Some(before) if before != state.u1 => {
                            self.violations
                                .push(format!("exchange changed duals at k={}", state.k));
                        }
                        Some(_) => {}
                        None => self
                            .violations
                            .push(format!("exchange without restore at k={}", state.k)),
                    }
                }
            }
            _ => {}
        }
    }

    fn boundary(&mut self, state: &VerbatimState) {
        self.check_always(state);
        for j in 1..=state.n {
            if state.span[j] <= 0 {
                self.violations.push(format!(
                    "span[{}] = {} not positive at scan boundary k={}",
                    j, state.span[j], state.k
                ));
            }
        }
    }
}
