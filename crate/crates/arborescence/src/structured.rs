//! Phase-structured reformulation of the verbatim engine.
//!
//! Same method, different vocabulary: instead of goto-reachable labels over
//! sign-marked span arrays, this engine runs named phases over an explicit
//! state (duals, a partial parent map, carried exchange pairs, and a
//! partition of the nodes into components). One scan column goes:
//!
//! 1. candidate search: cheapest reduced-cost arc entering the active
//!    component from outside, heads limited to scanned columns;
//! 2. dual raise: lift the component's duals until that arc is tight;
//! 3. backward trace: walk starred predecessors from the arc's tail,
//!    recording visited components and carrying the candidate pair;
//! 4. contract on re-entry: merge the visited components into the active
//!    one and search again, or
//! 5. exchange: replay the carried pairs, starring the candidate and
//!    re-homing each displaced predecessor.
//!
//! The two engines stay aligned step for step: projecting both onto
//! [`AbstractState`] at every scan boundary yields equal values, and the
//! final trees agree once the root conventions are normalized (this engine
//! ends by pointing the origin at itself). [`alignment_report`] checks all
//! of that for any instance.

use crate::instance::{Cost, ProblemInstance, Solution, Status};
use crate::verbatim::{self, VerbatimObserver, VerbatimState};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Union-find over 1..=n; the smallest member is the representative, so
/// component labels are canonical without bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Partition {
    parent: Vec<usize>,
}

impl Partition {
    fn new(n: usize) -> Self {
        Partition {
            parent: (0..=n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

/// Working state of the structured engine, 1-based with slot 0 as scratch.
#[derive(Debug, Clone)]
pub struct StructuredState {
    n: usize,
    origin: usize,
    u: Vec<Cost>,
    parent: Vec<Option<usize>>,
    carried: Vec<Option<(usize, usize)>>,
    comp: Partition,
}

/// Callbacks around the structured phases; `boundary` fires after
/// initialization (k = 0) and after each completed non-origin column.
pub trait StructuredObserver {
    fn boundary(&mut self, _k: usize, _state: &StructuredState) {}
    fn after_dual_raise(&mut self, _state: &StructuredState, _k: usize, _i1: usize, _j1: usize) {}
    fn before_exchange(&mut self, _state: &StructuredState) {}
    fn after_exchange(&mut self, _state: &StructuredState) {}
}

/// Observer that ignores everything.
pub struct Noop;

impl StructuredObserver for Noop {}

fn unpack(pair: Option<(usize, usize)>) -> (usize, usize) {
    pair.unwrap_or((0, 0))
}

fn pack(i: usize, j: usize) -> Option<(usize, usize)> {
    (i != 0 || j != 0).then_some((i, j))
}

impl StructuredState {
    fn new(inst: &ProblemInstance) -> Self {
        let n = inst.n();
        StructuredState {
            n,
            origin: inst.origin(),
            u: vec![0; n + 1],
            parent: vec![None; n + 1],
            carried: vec![None; n + 1],
            comp: Partition::new(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn dual(&self, j: usize) -> Cost {
        self.u[j]
    }

    pub fn parent_of(&self, j: usize) -> Option<usize> {
        self.parent[j]
    }

    pub fn carried_at(&self, j: usize) -> Option<(usize, usize)> {
        self.carried[j]
    }

    /// Canonical label (smallest member) of j's component.
    pub fn component_of(&self, j: usize) -> usize {
        self.comp.root(j)
    }

    /// Cheapest reduced-cost arc entering the active component, scanning
    /// member columns ascending and outside rows ascending so ties resolve
    /// exactly as in the verbatim engine.
    fn candidate_search(&mut self, inst: &ProblemInstance, k: usize) -> Option<(Cost, usize, usize)> {
        let m = inst.sentinel();
        let h = self.comp.find(k);
        let mut best: Option<(Cost, usize, usize)> = None;
        for j in 1..=k {
            if self.comp.find(j) != h {
                continue;
            }
            for i in 1..=self.n {
                if self.comp.find(i) == h || !inst.is_finite(i, j) {
                    continue;
                }
                let reduced = inst.cost(i, j) - self.u[j];
                let beats = match best {
                    None => reduced < m,
                    Some((du, _, _)) => reduced < du,
                };
                if beats {
                    best = Some((reduced, i, j));
                }
            }
        }
        best
    }

    fn dual_raise(&mut self, k: usize, du: Cost) {
        let h = self.comp.find(k);
        for j in 1..=k {
            if self.comp.find(j) == h {
                self.u[j] += du;
            }
        }
    }

    /// Walks starred predecessors from the candidate's tail, recording each
    /// visited component once and carrying the candidate pair at nodes whose
    /// slot is empty. Ends either back inside the active component (circuit)
    /// or at an unstarred node (root); on a root the visited set is simply
    /// dropped, which is this engine's restore step.
    fn backward_trace(&mut self, k: usize, i1: usize, j1: usize) -> Walk {
        let h = self.comp.find(k);
        let mut visited = Vec::new();
        let mut cursor = i1;
        loop {
            let c = self.comp.find(cursor);
            if c == h {
                return Walk::Circuit { visited };
            }
            let Some(next) = self.parent[cursor] else {
                return Walk::RootReached;
            };
            if !visited.contains(&c) {
                visited.push(c);
            }
            if self.carried[cursor].is_none() {
                self.carried[cursor] = Some((i1, j1));
            }
            cursor = next;
        }
    }

    /// Replays the carried pairs along the displacement chain, mirroring the
    /// verbatim exchange write for write.
    fn exchange(&mut self, k: usize, cand: (usize, usize)) {
        let (mut i1, mut j1) = cand;
        let (mut i2, mut j2) = (0usize, 0usize);
        loop {
            let pending = pack(i2, j2);
            for j in 1..=k {
                if unpack(self.carried[j]) == (i1, j1) {
                    self.carried[j] = pending;
                }
            }
            let (fetched_i, fetched_j) = unpack(self.carried[j1]);
            self.carried[j1] = pending;
            let displaced = self.parent[j1].unwrap_or(0);
            self.parent[j1] = Some(i1);
            if displaced == 0 {
                return;
            }
            i2 = displaced;
            j2 = j1;
            i1 = fetched_i;
            j1 = fetched_j;
        }
    }

    /// Projects onto the engine-neutral state shape.
    pub fn project(&self) -> AbstractState {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for j in 1..=self.n {
            groups.entry(self.comp.root(j)).or_default().push(j);
        }
        AbstractState {
            u: self.u[1..].to_vec(),
            parent: self.parent[1..].to_vec(),
            carried: self.carried[1..].to_vec(),
            components: groups.into_values().collect(),
        }
    }

    fn into_solution(self, status: Status, z: Cost) -> Solution {
        let spans: Vec<i64> = (1..=self.n).map(|j| self.comp.root(j) as i64).collect();
        let bars: Vec<(usize, usize)> = self.carried[1..].iter().map(|p| unpack(*p)).collect();
        Solution {
            status,
            z,
            predecessor: self.parent[1..]
                .iter()
                .map(|p| p.unwrap_or(0))
                .collect(),
            dual: self.u[1..].to_vec(),
            i_bar: bars.iter().map(|&(i, _)| i).collect(),
            j_bar: bars.iter().map(|&(_, j)| j).collect(),
            span: spans,
        }
    }
}

enum Walk {
    Circuit { visited: Vec<usize> },
    RootReached,
}

/// Solves the instance with the structured engine.
pub fn solve(inst: &ProblemInstance) -> Solution {
    solve_observed(inst, &mut Noop)
}

/// Solves the instance, reporting phase callbacks and scan boundaries.
pub fn solve_observed(inst: &ProblemInstance, obs: &mut dyn StructuredObserver) -> Solution {
    let mut st = StructuredState::new(inst);
    obs.boundary(0, &st);

    for k in 1..=st.n {
        if k == st.origin {
            continue;
        }
        let cand = loop {
            let Some((du, i1, j1)) = st.candidate_search(inst, k) else {
                return st.into_solution(Status::Infeasible, inst.sentinel());
            };
            st.dual_raise(k, du);
            obs.after_dual_raise(&st, k, i1, j1);
            match st.backward_trace(k, i1, j1) {
                Walk::Circuit { visited } => {
                    let h = st.comp.find(k);
                    for c in visited {
                        st.comp.union(h, c);
                    }
                }
                Walk::RootReached => break (i1, j1),
            }
        };
        obs.before_exchange(&st);
        st.exchange(k, cand);
        obs.after_exchange(&st);
        obs.boundary(k, &st);
    }

    st.parent[st.origin] = Some(st.origin);
    let z = (1..=st.n)
        .filter(|&j| j != st.origin)
        .map(|j| inst.cost(st.parent[j].unwrap_or(0), j))
        .sum();
    st.into_solution(Status::Optimum, z)
}

/// Engine-neutral view of a solver state: duals, partial parent map, carried
/// exchange pairs (all length n, node j at position j - 1), and the node
/// partition in canonical form (members ascending, components ordered by
/// smallest member). Equality on this type is exactly the alignment relation:
/// component labels have already been normalized away.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbstractState {
    pub u: Vec<Cost>,
    pub parent: Vec<Option<usize>>,
    pub carried: Vec<Option<(usize, usize)>>,
    pub components: Vec<Vec<usize>>,
}

/// Whether two projected states are aligned: equal duals, parent maps, and
/// carried pairs, with partitions equal as set families.
pub fn aligned(a: &AbstractState, b: &AbstractState) -> bool {
    a == b
}

/// A verbatim state that cannot be projected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("span[{node}] = {span} is negative; project only at phase boundaries")]
    NegativeSpan { node: usize, span: i64 },
}

/// Projects a verbatim state onto the engine-neutral shape. Rejects
/// mid-trace states: negative spans are walk marks, not components.
pub fn project_verbatim(st: &VerbatimState) -> Result<AbstractState, ProjectionError> {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for j in 1..=st.n {
        if st.span[j] < 0 {
            return Err(ProjectionError::NegativeSpan {
                node: j,
                span: st.span[j],
            });
        }
        groups.entry(st.span[j]).or_default().push(j);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    components.sort_by_key(|c| c[0]);
    Ok(AbstractState {
        u: st.u1[1..].to_vec(),
        parent: st.i_star[1..]
            .iter()
            .map(|&i| (i != 0).then_some(i))
            .collect(),
        carried: st.i_bar[1..]
            .iter()
            .zip(&st.j_bar[1..])
            .map(|(&i, &j)| pack(i, j))
            .collect(),
        components,
    })
}

/// One projected state per scan boundary, tagged with the engine name, in
/// the same record-per-line shape as the verbatim trace events.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRecord {
    pub engine: &'static str,
    pub k: usize,
    #[serde(flatten)]
    pub state: AbstractState,
}

/// Verbatim observer that projects every scan boundary.
#[derive(Debug, Default)]
pub struct ProjectedBoundaries {
    pub boundaries: Vec<(usize, AbstractState)>,
    pub error: Option<ProjectionError>,
}

impl VerbatimObserver for ProjectedBoundaries {
    fn boundary(&mut self, state: &VerbatimState) {
        match project_verbatim(state) {
            Ok(a) => self.boundaries.push((state.k, a)),
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e);
                }
            }
        }
    }
}

/// Structured observer that snapshots boundaries and audits the engine's own
/// invariants: after each dual raise the selected arc is tight and no
/// entering arc has negative reduced cost; the exchange never moves duals.
pub struct StructuredAudit<'a> {
    inst: &'a ProblemInstance,
    pub boundaries: Vec<(usize, AbstractState)>,
    pub violations: Vec<String>,
    u_before_exchange: Option<Vec<Cost>>,
}

impl<'a> StructuredAudit<'a> {
    pub fn new(inst: &'a ProblemInstance) -> Self {
        StructuredAudit {
            inst,
            boundaries: Vec::new(),
            violations: Vec::new(),
            u_before_exchange: None,
        }
    }
}

impl StructuredObserver for StructuredAudit<'_> {
    fn boundary(&mut self, k: usize, state: &StructuredState) {
        self.boundaries.push((k, state.project()));
    }

    fn after_dual_raise(&mut self, state: &StructuredState, k: usize, i1: usize, j1: usize) {
        let tight = self.inst.cost(i1, j1) - state.dual(j1);
        if tight != 0 {
            self.violations.push(format!(
                "selected arc ({i1}, {j1}) not tight after raise at k={k}: reduced cost {tight}"
            ));
        }
        let h = state.component_of(k);
        for j in 1..=k {
            if state.component_of(j) != h {
                continue;
            }
            for i in 1..=state.n() {
                if state.component_of(i) == h || !self.inst.is_finite(i, j) {
                    continue;
                }
                let reduced = self.inst.cost(i, j) - state.dual(j);
                if reduced < 0 {
                    self.violations.push(format!(
                        "entering arc ({i}, {j}) has negative reduced cost {reduced} at k={k}"
                    ));
                }
            }
        }
    }

    fn before_exchange(&mut self, state: &StructuredState) {
        self.u_before_exchange = Some(state.u.clone());
    }

    fn after_exchange(&mut self, state: &StructuredState) {
        if let Some(before) = self.u_before_exchange.take() {
            if before != state.u {
                self.violations.push("exchange changed duals".to_string());
            }
        }
    }
}

/// Pairwise boundary comparison of both engines on one instance, plus the
/// final-answer check after root-convention normalization.
#[derive(Debug, Clone, Serialize)]
pub struct AlignmentReport {
    pub boundaries_checked: usize,
    pub mismatched: Vec<usize>,
    pub count_mismatch: bool,
    pub projection_failure: Option<String>,
    pub final_agree: bool,
}

impl AlignmentReport {
    pub fn is_aligned(&self) -> bool {
        self.mismatched.is_empty()
            && !self.count_mismatch
            && self.projection_failure.is_none()
            && self.final_agree
    }
}

/// Runs both engines and checks Theorem-style alignment: projected states
/// equal at every scan boundary, final answers equal after normalizing the
/// origin convention.
pub fn alignment_report(inst: &ProblemInstance) -> AlignmentReport {
    let mut vb = ProjectedBoundaries::default();
    let v_sol = verbatim::solve_observed(inst, &mut vb);
    let mut sa = StructuredAudit::new(inst);
    let s_sol = solve_observed(inst, &mut sa);

    let mut mismatched = Vec::new();
    for ((vk, va), (sk, sb)) in vb.boundaries.iter().zip(&sa.boundaries) {
        if vk != sk || !aligned(va, sb) {
            mismatched.push(*vk);
        }
    }
    let count_mismatch = vb.boundaries.len() != sa.boundaries.len();
    let final_agree = v_sol.status == s_sol.status
        && v_sol.z == s_sol.z
        && (v_sol.status != Status::Optimum
            || v_sol.normalized_predecessor(inst.origin())
                == s_sol.normalized_predecessor(inst.origin()));

    AlignmentReport {
        boundaries_checked: vb.boundaries.len().min(sa.boundaries.len()),
        mismatched,
        count_mismatch,
        projection_failure: vb.error.map(|e| e.to_string()),
        final_agree,
    }
}
