//! Floyd–Warshall engine over a reduced matrix.
//!
//! Three extension policies share one triangle operation
//! `d[i,k] := min(d[i,k], d[i,j0] + d[j0,k])`:
//!
//! * [`Policy::Classic`] extends every finite entry (all-pairs shortest paths);
//! * [`Policy::NegativeValued`] extends only negative entries and keeps only
//!   negative results, closing a path back onto its origin to expose a
//!   negative cycle;
//! * [`Policy::Below`] extends and keeps only values under a positive bound,
//!   enumerating low-valued cycles of a matrix without negative cycles.
//!
//! Improved entries always hold simple paths. An extension that would revisit
//! a vertex is refused and the entry keeps its value.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::cycle::CycleCandidate;
use crate::error::{Error, Result};
use crate::greedy::{admissible, GreedyStep, GreedyTrace};
use crate::matrix::{CostMatrix, ReducedMatrix};
use crate::perm::Permutation;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct PathNode {
    pivot: u32,
    left: u32,
    right: u32,
    from: u32,
    to: u32,
}

/// Immutable path DAG. A node is either an original arc or the concatenation
/// of two earlier nodes through a pivot; stored entries never change under
/// later updates, so expansion always matches the value recorded with it.
#[derive(Clone, Debug)]
struct PathArena {
    words: usize,
    nodes: Vec<PathNode>,
    bits: Vec<u64>,
}

impl PathArena {
    fn new(n: usize) -> Self {
        PathArena {
            words: n.div_ceil(64).max(1),
            nodes: Vec::new(),
            bits: Vec::new(),
        }
    }

    fn leaf(&mut self, a: usize, b: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(PathNode {
            pivot: NONE,
            left: NONE,
            right: NONE,
            from: a as u32,
            to: b as u32,
        });
        let base = self.bits.len();
        self.bits.resize(base + self.words, 0);
        self.bits[base + a / 64] |= 1 << (a % 64);
        self.bits[base + b / 64] |= 1 << (b % 64);
        id
    }

    fn concat(&mut self, left: u32, right: u32) -> u32 {
        let (l, r) = (self.nodes[left as usize], self.nodes[right as usize]);
        let id = self.nodes.len() as u32;
        self.nodes.push(PathNode {
            pivot: l.to,
            left,
            right,
            from: l.from,
            to: r.to,
        });
        let w = self.words;
        for k in 0..w {
            let v = self.bits[left as usize * w + k] | self.bits[right as usize * w + k];
            self.bits.push(v);
        }
        id
    }

    fn bits(&self, id: u32) -> &[u64] {
        let w = self.words;
        &self.bits[id as usize * w..(id as usize + 1) * w]
    }

    /// `left ∩ right` is exactly `allowed`.
    fn meets_only(&self, left: u32, right: u32, allowed: &[usize]) -> bool {
        let (a, b) = (self.bits(left), self.bits(right));
        (0..self.words).all(|k| {
            let mut expect = 0u64;
            for &v in allowed {
                if v / 64 == k {
                    expect |= 1 << (v % 64);
                }
            }
            a[k] & b[k] == expect
        })
    }

    /// Vertex sequence of a node, refusing expansions longer than `limit` arcs.
    fn expand(&self, id: u32, limit: usize) -> Option<Vec<usize>> {
        let mut out = vec![self.nodes[id as usize].from as usize];
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            let node = self.nodes[x as usize];
            if node.pivot == NONE {
                out.push(node.to as usize);
                if out.len() > limit + 1 {
                    return None;
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
        Some(out)
    }
}

/// Extension policy for the triangle operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    Classic,
    NegativeValued,
    Below(i64),
}

impl Policy {
    fn extends(self, v: Cost) -> bool {
        match self {
            Policy::Classic => v.is_finite(),
            Policy::NegativeValued => v.is_negative(),
            Policy::Below(b) => v.lt(b),
        }
    }

    fn keeps(self, v: Cost) -> bool {
        self.extends(v)
    }

    fn closes(self, v: Cost) -> bool {
        match self {
            Policy::Classic | Policy::NegativeValued => v.is_negative(),
            Policy::Below(b) => v.lt(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FwEventKind {
    Update { from: usize, to: usize, value: Cost },
    Refused { from: usize, to: usize },
    Closure { cycle: Vec<usize>, value: Cost },
}

/// One engine event, stamped with its sweep position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FwEvent {
    /// 1-based iteration (full column sweep).
    pub iteration: usize,
    /// Pivot column, 0-based.
    pub column: usize,
    pub kind: FwEventKind,
}

impl FwEvent {
    /// Number of columns processed before this event, counting from the
    /// start of the first iteration.
    pub fn position(&self, n: usize) -> usize {
        (self.iteration - 1) * n + self.column
    }

    /// Trace line, e.g. `(7, 4)(4, 6): -5`.
    pub fn line(&self) -> String {
        let j = self.column + 1;
        match &self.kind {
            FwEventKind::Update { from, to, value } => {
                format!("({}, {j})({j}, {}): {value}", from + 1, to + 1)
            }
            FwEventKind::Refused { from, to } => {
                format!("({}, {j})({j}, {}): not simple", from + 1, to + 1)
            }
            FwEventKind::Closure { cycle, value } => {
                format!("cycle {}: {value}", crate::perm::cycle_notation(cycle))
            }
        }
    }
}

/// Result of one triangle operation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MutationReport {
    pub updates: usize,
    pub refused: usize,
    /// Cycles closed through the pivot, in row order, with their values.
    pub closures: Vec<(Vec<usize>, Cost)>,
}

/// Current negative entries, bucketed by column and ordered by value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NegativePathIndex {
    columns: Vec<BTreeSet<(Cost, usize)>>,
}

impl NegativePathIndex {
    /// `(value, row)` pairs of column `j`, ascending.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (Cost, usize)> + '_ {
        self.columns[j].iter().copied()
    }

    pub fn len(&self) -> usize {
        self.columns.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Called with the column, the closed cycle and its value; a returned
/// bound tightens the policy.
type ClosureHook<'a> = dyn FnMut(&mut FwState, usize, Vec<usize>, Cost) -> Option<i64> + 'a;

/// Working state of the engine.
#[derive(Clone, Debug)]
pub struct FwState {
    n: usize,
    base: ReducedMatrix,
    values: Vec<Cost>,
    entry: Vec<u32>,
    closed: Vec<bool>,
    arena: PathArena,
    index: NegativePathIndex,
    /// Completed iterations.
    pub iteration: usize,
    events: Option<Vec<FwEvent>>,
}

impl FwState {
    pub fn new(r: &ReducedMatrix) -> Self {
        let n = r.n();
        let values: Vec<Cost> = (0..n * n).map(|k| r.get(k / n, k % n)).collect();
        let mut s = FwState {
            n,
            base: r.clone(),
            values,
            entry: vec![NONE; n * n],
            closed: vec![false; n * n],
            arena: PathArena::new(n),
            index: NegativePathIndex::default(),
            iteration: 0,
            events: None,
        };
        s.rebuild_index();
        s
    }

    /// Records every update, refusal and closure.
    pub fn with_events(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, k: usize) -> Cost {
        self.values[i * self.n + k]
    }

    /// Pivot recorded for the last improvement of `(i, k)`.
    pub fn pivot(&self, i: usize, k: usize) -> Option<usize> {
        match self.entry[i * self.n + k] {
            NONE => None,
            id => {
                let p = self.arena.nodes[id as usize].pivot;
                (p != NONE).then_some(p as usize)
            }
        }
    }

    /// The entry has been extended at its pivot and not improved since.
    pub fn is_closed(&self, i: usize, k: usize) -> bool {
        self.closed[i * self.n + k]
    }

    pub fn events(&self) -> &[FwEvent] {
        self.events.as_deref().unwrap_or(&[])
    }

    pub fn negative_index(&self) -> &NegativePathIndex {
        &self.index
    }

    /// Blocks an arc for the rest of the search.
    pub fn exclude_arc(&mut self, i: usize, k: usize) {
        let at = i * self.n + k;
        self.values[at] = Cost::Infinite;
        self.entry[at] = NONE;
        self.base.set(i, k, Cost::Infinite);
    }

    fn node(&mut self, i: usize, k: usize) -> u32 {
        let at = i * self.n + k;
        if self.entry[at] == NONE {
            self.entry[at] = self.arena.leaf(i, k);
        }
        self.entry[at]
    }

    fn rebuild_index(&mut self) {
        let n = self.n;
        let mut columns = vec![BTreeSet::new(); n];
        for i in 0..n {
            for (j, col) in columns.iter_mut().enumerate() {
                let v = self.values[i * n + j];
                if i != j && v.is_negative() {
                    col.insert((v, i));
                }
            }
        }
        self.index = NegativePathIndex { columns };
    }

    fn emit(&mut self, column: usize, kind: FwEventKind) {
        let iteration = self.iteration + 1;
        if let Some(ev) = self.events.as_mut() {
            ev.push(FwEvent {
                iteration,
                column,
                kind,
            });
        }
    }

    /// Triangle operation through pivot `j0` under `policy`.
    pub fn triangle(&mut self, j0: usize, policy: Policy) -> MutationReport {
        let n = self.n;
        let mut report = MutationReport::default();
        for i in 0..n {
            if i == j0 {
                continue;
            }
            let left_val = self.values[i * n + j0];
            if !policy.extends(left_val) {
                continue;
            }
            for k in 0..n {
                if k == j0 {
                    continue;
                }
                let right_val = self.values[j0 * n + k];
                let cand = left_val + right_val;
                if k == i {
                    if !policy.closes(cand) {
                        continue;
                    }
                    let (l, r) = (self.node(i, j0), self.node(j0, i));
                    if !self.arena.meets_only(l, r, &[i, j0]) {
                        report.refused += 1;
                        continue;
                    }
                    let mut cycle = self.arena.expand(l, n).expect("simple path");
                    let tail = self.arena.expand(r, n).expect("simple path");
                    cycle.extend(&tail[1..tail.len() - 1]);
                    self.emit(
                        j0,
                        FwEventKind::Closure {
                            cycle: cycle.clone(),
                            value: cand,
                        },
                    );
                    report.closures.push((cycle, cand));
                    continue;
                }
                if !(policy.keeps(cand) && cand < self.values[i * n + k]) {
                    continue;
                }
                let (l, r) = (self.node(i, j0), self.node(j0, k));
                if !self.arena.meets_only(l, r, &[j0]) {
                    report.refused += 1;
                    self.emit(j0, FwEventKind::Refused { from: i, to: k });
                    continue;
                }
                let id = self.arena.concat(l, r);
                let at = i * n + k;
                self.entry[at] = id;
                self.values[at] = cand;
                self.closed[at] = false;
                report.updates += 1;
                self.emit(
                    j0,
                    FwEventKind::Update {
                        from: i,
                        to: k,
                        value: cand,
                    },
                );
            }
            self.closed[i * n + j0] = true;
        }
        report
    }

    /// One full column sweep; stops early at the first closure when
    /// `stop_on_closure` is set.
    fn sweep(
        &mut self,
        policy: &mut Policy,
        stop_on_closure: bool,
        on_closure: &mut ClosureHook<'_>,
    ) -> (usize, bool) {
        let mut updates = 0;
        for j0 in 0..self.n {
            let report = self.triangle(j0, *policy);
            updates += report.updates;
            for (cycle, value) in report.closures {
                if let Some(b) = on_closure(self, j0, cycle, value) {
                    if let Policy::Below(cur) = policy {
                        *cur = b.min(*cur);
                    }
                }
                if stop_on_closure {
                    return (updates, true);
                }
            }
        }
        self.iteration += 1;
        self.rebuild_index();
        (updates, false)
    }

    /// Walk behind entry `(i, k)`, expanded through the pivots.
    pub fn reconstruct_path(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        match self.entry[i * self.n + k] {
            NONE => Ok(vec![i, k]),
            id => self
                .arena
                .expand(id, self.n)
                .ok_or(Error::CorruptPathTable {
                    from: i,
                    to: k,
                    limit: self.n,
                }),
        }
    }

    /// Sum of original arc values along a walk.
    pub fn walk_value(&self, walk: &[usize]) -> Cost {
        walk.windows(2).map(|w| self.base.get(w[0], w[1])).sum()
    }

    /// Values and pivots laid out as two `n x n` tables, 1-based; closed
    /// entries carry a trailing `*`.
    pub fn dump(&self, header: Option<&Permutation>) -> String {
        let n = self.n;
        let mut s = String::new();
        let cell = |s: &mut String, v: String| {
            let _ = write!(s, "{v:>6}");
        };
        let head = |s: &mut String| {
            if let Some(p) = header {
                s.push_str("      ");
                for j in 0..n {
                    cell(s, (p.image(j) + 1).to_string());
                }
                s.push('\n');
            }
            s.push_str("      ");
            for j in 0..n {
                cell(s, (j + 1).to_string());
            }
            s.push('\n');
        };
        let _ = writeln!(s, "values after iteration {}", self.iteration);
        head(&mut s);
        for i in 0..n {
            cell(&mut s, (i + 1).to_string());
            for k in 0..n {
                let mut v = self.value(i, k).to_string();
                if self.is_closed(i, k) {
                    v.push('*');
                }
                cell(&mut s, v);
            }
            s.push('\n');
        }
        let _ = writeln!(s, "path table after iteration {}", self.iteration);
        head(&mut s);
        for i in 0..n {
            cell(&mut s, (i + 1).to_string());
            for k in 0..n {
                cell(
                    &mut s,
                    self.pivot(i, k)
                        .map_or(".".to_string(), |p| (p + 1).to_string()),
                );
            }
            s.push('\n');
        }
        s
    }
}

/// Classic Floyd–Warshall: one sweep over every pivot.
pub fn floyd_warshall(r: &ReducedMatrix) -> FwState {
    let mut st = FwState::new(r);
    let mut policy = Policy::Classic;
    st.sweep(&mut policy, false, &mut |_, _, _, _| None);
    st
}

/// A negative cycle and where the engine found it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeCycle {
    pub cycle: CycleCandidate,
    /// 1-based iteration of detection.
    pub iteration: usize,
    /// Pivot column of detection, 0-based.
    pub column: usize,
}

/// Outcome of a negatively-valued-subpath search.
#[derive(Clone, Debug)]
pub struct NegativeSearch {
    pub found: Option<NegativeCycle>,
    pub state: FwState,
}

/// Negatively-valued-subpath search for the first negative cycle, over at
/// most `n - 1` iterations.
pub fn search_negative_cycle(r: &ReducedMatrix, with_events: bool) -> NegativeSearch {
    let mut st = FwState::new(r);
    if with_events {
        st = st.with_events();
    }
    let max_iter = r.n().saturating_sub(1).max(1);
    let mut policy = Policy::NegativeValued;
    let mut found = None;
    for _ in 0..max_iter {
        let (updates, stopped) = st.sweep(&mut policy, true, &mut |s, j0, cycle, _| {
            let cand = CycleCandidate::from_reduced(&s.base, cycle);
            found = Some(NegativeCycle {
                cycle: cand,
                iteration: s.iteration + 1,
                column: j0,
            });
            None
        });
        if stopped || updates == 0 {
            break;
        }
    }
    NegativeSearch { found, state: st }
}

pub fn find_negative_cycle(r: &ReducedMatrix) -> Option<CycleCandidate> {
    search_negative_cycle(r, false).found.map(|f| f.cycle)
}

/// Outcome of a bounded enumeration.
#[derive(Clone, Debug)]
pub struct BoundedSearch {
    /// Distinct cycles yielded, in discovery order.
    pub cycles: Vec<CycleCandidate>,
    pub final_bound: i64,
    pub state: FwState,
}

/// Bounded non-negatively-valued-subpath enumeration: extends only paths
/// below the current bound and yields each distinct simple cycle of value
/// below it. `on_cycle` returns the bound to use from the next extension
/// check onward.
pub fn enumerate_bounded_cycles(
    r: &ReducedMatrix,
    bound: i64,
    with_events: bool,
    mut on_cycle: impl FnMut(&CycleCandidate) -> i64,
) -> BoundedSearch {
    let mut st = FwState::new(r);
    if with_events {
        st = st.with_events();
    }
    let mut cycles = Vec::new();
    let mut policy = Policy::Below(bound);
    if bound > 0 {
        let mut seen = HashSet::new();
        let max_iter = r.n().saturating_sub(1).max(1);
        for _ in 0..max_iter {
            let (updates, _) = st.sweep(&mut policy, false, &mut |s, _, cycle, _| {
                let cand = CycleCandidate::from_reduced(&s.base, cycle);
                if !seen.insert(cand.canonical()) {
                    return None;
                }
                let b = on_cycle(&cand);
                cycles.push(cand);
                Some(b)
            });
            if updates == 0 {
                break;
            }
        }
    }
    let Policy::Below(final_bound) = policy else {
        unreachable!("policy stays bounded")
    };
    BoundedSearch {
        cycles,
        final_bound,
        state: st,
    }
}

/// Result of canceling negative cycles down to an optimal assignment.
#[derive(Clone, Debug)]
pub struct Phase2Outcome {
    pub assignment: Permutation,
    pub cost: Cost,
    pub canceled: Vec<CycleCandidate>,
    /// Arcs blocked because their cycle would have created a fixed point.
    pub excluded_arcs: Vec<(usize, usize)>,
    pub events: Vec<String>,
}

/// Cancels negative cycles of the reduced matrix, starting from the last
/// derangement of `trace`, until none remains. Each canceled cycle is
/// appended to `trace` as a new step.
pub fn phase2_run(
    m: &CostMatrix,
    trace: &mut GreedyTrace,
    with_events: bool,
) -> Result<Phase2Outcome> {
    let mut p = trace.last().clone();
    let mut canceled = Vec::new();
    let mut excluded_arcs = Vec::new();
    let mut events = Vec::new();
    let mut blocked: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut r = ReducedMatrix::new(m, &p);
        for &(a, b) in &blocked {
            r.set(a, b, Cost::Infinite);
        }
        let search = search_negative_cycle(&r, with_events);
        if with_events {
            events.extend(search.state.events().iter().map(|e| {
                format!(
                    "iteration {} column {}: {}",
                    e.iteration,
                    e.column + 1,
                    e.line()
                )
            }));
        }
        let Some(found) = search.found else {
            if with_events {
                let paths = negative_paths(&search.state);
                events.push(format!(
                    "no negative cycle; negative paths: {}",
                    paths.join(", ")
                ));
            }
            break;
        };
        let cycle = found.cycle;
        if !admissible(&cycle.vertices, &p) {
            let k = cycle.len();
            let (a, b) = (cycle.vertices[k - 1], cycle.vertices[0]);
            blocked.push((a, b));
            excluded_arcs.push((a, b));
            continue;
        }
        blocked.clear();
        let next = p.apply_cycle(&cycle.vertices);
        let cost = next.cost(m)?;
        if with_events {
            events.push(format!("cancel {}  {}", cycle, cycle.total));
        }
        trace.steps.push(GreedyStep {
            start: cycle.vertices[0],
            cycles: vec![cycle.clone()],
            total: cycle.total,
        });
        trace.derangements.push(next.clone());
        trace.costs.push(cost);
        canceled.push(cycle);
        p = next;
    }
    let cost = p.cost(m)?;
    Ok(Phase2Outcome {
        assignment: p,
        cost,
        canceled,
        excluded_arcs,
        events,
    })
}

/// Improved negative entries as `[a, .., b] = v`, 1-based.
pub fn negative_paths(st: &FwState) -> Vec<String> {
    let n = st.n();
    let mut out = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if st.pivot(i, k).is_some() && st.value(i, k).is_negative() {
                let walk = st.reconstruct_path(i, k).unwrap_or_default();
                let verts: Vec<String> = walk.iter().map(|v| (v + 1).to_string()).collect();
                out.push(format!("[{}] = {}", verts.join(", "), st.value(i, k)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;

    fn sparse(n: usize, arcs: &[(usize, usize, i64)]) -> ReducedMatrix {
        let mut v = vec![Cost::Infinite; n * n];
        for &(a, b, w) in arcs {
            v[(a - 1) * n + (b - 1)] = Cost::Finite(w);
        }
        ReducedMatrix::from_values(n, v).unwrap()
    }

    #[test]
    fn triangle_worked_example() {
        let r = sparse(
            10,
            &[(1, 3, 5), (3, 7, -2), (1, 7, 25), (7, 10, -5), (1, 10, 7)],
        );
        let mut st = FwState::new(&r);
        st.triangle(2, Policy::Classic);
        assert_eq!(st.value(0, 6), Cost::Finite(3));
        assert_eq!(st.pivot(0, 6), Some(2));
        st.triangle(6, Policy::Classic);
        assert_eq!(st.value(0, 9), Cost::Finite(-2));
        assert_eq!(st.reconstruct_path(0, 9).unwrap(), vec![0, 2, 6, 9]);
        let before = st.value(0, 9);
        let report = st.triangle(0, Policy::Classic);
        assert_eq!(report.updates, 0);
        assert_eq!(st.value(0, 9), before);
        assert_eq!(st.reconstruct_path(4, 5).unwrap(), vec![4, 5]);
    }

    #[test]
    fn closing_arc_exposes_cycle() {
        let r = sparse(
            10,
            &[
                (1, 3, 5),
                (3, 7, -2),
                (1, 7, 25),
                (7, 10, -5),
                (1, 10, 7),
                (10, 1, 1),
            ],
        );
        let c = find_negative_cycle(&r).unwrap();
        assert_eq!(c.canonical(), vec![0, 2, 6, 9]);
        assert_eq!(c.total, Cost::Finite(-1));
    }

    #[test]
    fn example_after_greedy_has_no_negative_cycle() {
        let m = example1::matrix();
        let r = ReducedMatrix::new(&m, &example1::d3());
        let s = search_negative_cycle(&r, true);
        assert!(s.found.is_none());
        assert_eq!(negative_paths(&s.state), vec!["[7, 4, 6] = -5".to_string()]);
        let first = &s.state.events()[0];
        assert_eq!(first.line(), "(7, 4)(4, 6): -5");
        assert_eq!((first.iteration, first.column), (1, 3));
    }

    #[test]
    fn undoing_first_exchange_plants_the_cycle_back() {
        // D1 = D (5 6 4); starting again from D the cycle (5 6 4) is negative
        let m = example1::matrix();
        let r = ReducedMatrix::new(&m, &example1::start_tour());
        let c = find_negative_cycle(&r).unwrap();
        assert!(c.total.is_negative());
        assert_eq!(r.cycle_value(&c.vertices), c.total);
    }

    #[test]
    fn positive_matrix_stops_after_one_sweep() {
        let n = 5;
        let r = ReducedMatrix::from_values(n, vec![Cost::Finite(3); n * n]).unwrap();
        let s = search_negative_cycle(&r, false);
        assert!(s.found.is_none());
        assert_eq!(s.state.iteration, 1);
    }

    #[test]
    fn bounded_enumeration_on_example() {
        let m = example1::matrix();
        let r = ReducedMatrix::new(&m, &example1::d3());
        let s = enumerate_bounded_cycles(&r, 6, true, |_| 6);
        assert!(s.cycles.is_empty());
        assert_eq!(s.state.value(6, 2), Cost::Finite(-17));
        assert_eq!(s.state.reconstruct_path(6, 2).unwrap(), vec![6, 7, 2]);
        assert_eq!(s.state.value(6, 4), Cost::Finite(2));
        let lines: Vec<String> = s.state.events().iter().map(FwEvent::line).collect();
        assert_eq!(
            lines,
            vec![
                "(8, 3)(3, 1): 0",
                "(7, 4)(4, 2): 0",
                "(7, 4)(4, 6): -5",
                "(7, 8)(8, 1): 1",
                "(7, 8)(8, 3): -17",
                "(7, 1)(1, 5): 2",
                "(8, 1)(1, 5): 1",
                "(8, 1)(1, 6): -5",
            ]
        );
        let none = enumerate_bounded_cycles(&r, 1, false, |_| 1);
        assert!(none.cycles.is_empty());
        let wide = enumerate_bounded_cycles(&r, 40, false, |_| 40);
        assert!(!wide.cycles.is_empty());
        for c in &wide.cycles {
            assert!(c.total.lt(40));
            assert_eq!(r.cycle_value(&c.vertices), c.total);
        }
    }

    #[test]
    fn phase2_keeps_optimal_assignment() {
        let m = example1::matrix();
        let mut trace = crate::greedy::phase1_run(
            &m,
            &example1::start_tour(),
            &crate::greedy::Phase1Params::for_size(8),
        )
        .unwrap();
        let before = trace.derangements.len();
        let out = phase2_run(&m, &mut trace, false).unwrap();
        assert_eq!(out.assignment, example1::d3());
        assert_eq!(out.cost, Cost::Finite(155));
        assert!(out.canceled.is_empty());
        assert_eq!(trace.derangements.len(), before);
    }

    #[test]
    fn dump_layout() {
        let m = example1::matrix();
        let d3 = example1::d3();
        let st = floyd_warshall(&ReducedMatrix::new(&m, &d3));
        let text = st.dump(Some(&d3));
        assert!(text.starts_with("values after iteration 1\n"));
        assert!(text.contains("path table after iteration 1"));
    }
}
