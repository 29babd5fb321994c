//! Tour recovery from an optimal assignment.
//!
//! The cheapest tour met so far fixes a bound `m = best - cost(ap)`. Any
//! better tour is the optimal assignment composed with disjoint cycles of
//! the reduced matrix whose values sum below `m`, so only cycles under the
//! bound are collected, first by the bounded Floyd–Warshall enumeration and
//! then by an exhaustive depth-first search (the c-trees).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::Cost;
use crate::cycle::{move_order, CycleCandidate};
use crate::error::Result;
use crate::fw::{enumerate_bounded_cycles, floyd_warshall};
use crate::greedy::{floor_log2, phase1_run, GreedyTrace, Phase1Params};
use crate::matrix::{CostMatrix, ReducedMatrix};
use crate::perm::Permutation;

/// Best tour so far and the bound it implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundState {
    pub best_tour: Permutation,
    pub best_value: Cost,
    pub ap_value: Cost,
    /// `best_value - ap_value`; infinite while no finite tour is known.
    pub m: Cost,
    pub history: Vec<Cost>,
}

impl BoundState {
    pub fn new(tour: Permutation, value: Cost, ap_value: Cost) -> Self {
        let m = gap(value, ap_value);
        BoundState {
            best_tour: tour,
            best_value: value,
            ap_value,
            m,
            history: vec![m],
        }
    }

    /// Keeps `tour` if it is strictly cheaper.
    pub fn offer(&mut self, tour: &Permutation, value: Cost) -> bool {
        if value >= self.best_value || !tour.is_tour() {
            return false;
        }
        self.best_tour = tour.clone();
        self.best_value = value;
        self.m = gap(value, self.ap_value);
        self.history.push(self.m);
        true
    }
}

fn gap(value: Cost, ap: Cost) -> Cost {
    match (value, ap) {
        (Cost::Finite(v), Cost::Finite(a)) => Cost::Finite(v - a),
        _ => Cost::Infinite,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    OptimalProven,
    BudgetExhausted,
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Certificate::OptimalProven => "optimal-proven",
            Certificate::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase3Params {
    /// Phase 1 reruns when no stored permutation yields a tour; `None`
    /// means `n * floor(log2 n)`.
    pub restarts: Option<usize>,
    /// Largest number of cycles combined into one product; 0 is unlimited.
    pub product_cap: usize,
    pub node_budget: u64,
    pub time_limit: Duration,
    pub seed: u64,
    pub trace: bool,
}

impl Phase3Params {
    pub fn for_size(n: usize, seed: u64) -> Self {
        Phase3Params {
            restarts: None,
            product_cap: floor_log2(n).max(1),
            node_budget: 1_000_000,
            time_limit: Duration::from_secs(60),
            seed,
            trace: false,
        }
    }
}

/// Cheapest tour among the start tour, the stored derangements, and every
/// stored derangement composed with a bag cycle. Phase 1 is rerun from
/// seeded random tours when nothing but the start tour qualifies.
pub fn initial_tour(
    trace: &GreedyTrace,
    ap: &Permutation,
    m: &CostMatrix,
    phase1: &Phase1Params,
    params: &Phase3Params,
    events: &mut Vec<String>,
) -> Result<BoundState> {
    let ap_value = ap.cost(m)?;
    let start = &trace.derangements[0];
    let mut bounds = BoundState::new(start.clone(), start.cost(m)?, ap_value);
    let found = scan_trace(trace, m, &mut bounds, events)?;
    if ap.is_tour() {
        bounds.offer(ap, ap_value);
    }
    if !found && !ap.is_tour() {
        let n = m.n();
        let restarts = params.restarts.unwrap_or(n * floor_log2(n));
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(1));
        let quiet = Phase1Params {
            trace: false,
            ..*phase1
        };
        for k in 0..restarts {
            let d0 = Permutation::random_tour(n, &mut rng);
            let rerun = phase1_run(m, &d0, &quiet)?;
            bounds.offer(&d0, d0.cost(m)?);
            if scan_trace(&rerun, m, &mut bounds, &mut Vec::new())? && params.trace {
                events.push(format!(
                    "restart {}: {}  {}",
                    k + 1,
                    bounds.best_tour,
                    bounds.best_value
                ));
            }
        }
    }
    bounds.history = vec![bounds.m];
    if params.trace {
        events.push(format!(
            "initial tour {}  {}",
            bounds.best_tour, bounds.best_value
        ));
        events.push(format!("m0 = {}", bounds.m));
    }
    Ok(bounds)
}

fn scan_trace(
    trace: &GreedyTrace,
    m: &CostMatrix,
    bounds: &mut BoundState,
    events: &mut Vec<String>,
) -> Result<bool> {
    let mut found = false;
    for (h, d) in trace.derangements.iter().enumerate().skip(1) {
        if d.is_tour() {
            found = true;
            let c = d.cost(m)?;
            events.push(format!("D{h} is a tour  {c}"));
            bounds.offer(d, c);
        }
        for cyc in &trace.bag {
            let t = d.apply_cycle(&cyc.vertices);
            if t.is_tour() {
                found = true;
                let c = t.cost(m)?;
                events.push(format!("D{h}{cyc} is a tour  {c}"));
                bounds.offer(&t, c);
            }
        }
    }
    Ok(found)
}

/// Outcome of a product search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProductSearch {
    pub improved: bool,
    /// Some disjoint subset larger than the cap stays under the final bound,
    /// or the budget ran out before that could be ruled out.
    pub cap_binding: bool,
    /// Every product under the bound was examined within the budget.
    pub complete: bool,
}

/// Lazy enumeration of the disjoint subsets of a pool sorted by ascending
/// non-negative total. Each index-sorted subset has one parent: drop its
/// last index if the last two are adjacent, otherwise decrement the last
/// index. Children never cost less, so a heap yields subsets in order.
struct SubsetQueue<'a> {
    pool: &'a [&'a CycleCandidate],
    masks: Vec<Vec<u64>>,
    heap: BinaryHeap<Reverse<(Cost, usize, Vec<usize>)>>,
    limit: usize,
}

impl<'a> SubsetQueue<'a> {
    fn new(pool: &'a [&'a CycleCandidate], n: usize, limit: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let masks = pool
            .iter()
            .map(|c| {
                let mut w = vec![0u64; words];
                for &v in &c.vertices {
                    w[v / 64] |= 1 << (v % 64);
                }
                w
            })
            .collect();
        let mut heap = BinaryHeap::new();
        if let Some(first) = pool.first() {
            heap.push(Reverse((first.total, 1, vec![0])));
        }
        SubsetQueue {
            pool,
            masks,
            heap,
            limit,
        }
    }

    fn peek_total(&self) -> Option<Cost> {
        self.heap.peek().map(|Reverse((t, _, _))| *t)
    }

    /// Next subset in order, with whether it is pairwise disjoint.
    fn pop(&mut self) -> Option<(Cost, Vec<usize>, bool)> {
        let Reverse((total, _, set)) = self.heap.pop()?;
        let last = *set.last().expect("non-empty subset");
        let mut union = vec![0u64; self.masks[last].len()];
        for &k in &set[..set.len() - 1] {
            for (u, w) in union.iter_mut().zip(&self.masks[k]) {
                *u |= w;
            }
        }
        let disjoint = union.iter().zip(&self.masks[last]).all(|(u, w)| u & w == 0);
        if last + 1 < self.pool.len() {
            let mut shifted = set.clone();
            *shifted.last_mut().expect("non-empty subset") = last + 1;
            let t = total - self.pool[last].total + self.pool[last + 1].total;
            self.heap.push(Reverse((t, shifted.len(), shifted)));
            if disjoint && set.len() < self.limit {
                let mut grown = set.clone();
                grown.push(last + 1);
                let t = total + self.pool[last + 1].total;
                self.heap.push(Reverse((t, grown.len(), grown)));
            }
        }
        Some((total, set, disjoint))
    }
}

/// Tries products of pairwise-disjoint cycles in ascending total value and
/// keeps the first that turns `ap` into a cheaper tour. The cycles must come
/// from a reduced matrix without negative cycles; `budget` bounds the number
/// of subsets examined by each of the two searches.
pub fn improve_by_products(
    bounds: &mut BoundState,
    cycles: &[CycleCandidate],
    ap: &Permutation,
    cap: usize,
    budget: u64,
) -> ProductSearch {
    let mut pool: Vec<&CycleCandidate> = cycles.iter().filter(|c| c.total < bounds.m).collect();
    debug_assert!(pool.iter().all(|c| !c.total.is_negative()));
    pool.sort_by(|a, b| move_order(std::slice::from_ref(*a), std::slice::from_ref(*b)));
    let limit = if cap == 0 { usize::MAX } else { cap };
    let mut out = ProductSearch {
        complete: true,
        ..Default::default()
    };
    let mut queue = SubsetQueue::new(&pool, ap.n(), limit);
    let mut spent = 0u64;
    while queue.peek_total().is_some_and(|t| t < bounds.m) {
        if spent == budget {
            out.complete = false;
            break;
        }
        spent += 1;
        let (total, set, disjoint) = queue.pop().expect("peeked");
        if !disjoint {
            continue;
        }
        let mut t = ap.clone();
        for &k in &set {
            t = t.apply_cycle(&pool[k].vertices);
        }
        if t.is_tour() {
            out.improved = bounds.offer(&t, bounds.ap_value + total);
            break;
        }
    }
    if cap != 0 {
        let mut wide = SubsetQueue::new(&pool, ap.n(), usize::MAX);
        let mut spent = 0u64;
        while wide.peek_total().is_some_and(|t| t < bounds.m) {
            if spent == budget {
                out.cap_binding = true;
                break;
            }
            spent += 1;
            let (_, set, disjoint) = wide.pop().expect("peeked");
            if disjoint && set.len() > cap {
                out.cap_binding = true;
                break;
            }
        }
    }
    out
}

/// Depth-first cycle search under a bound.
#[derive(Clone, Debug)]
pub struct CTree {
    pub roots: Vec<usize>,
    pub node_budget: u64,
    pub time_limit: Duration,
    /// Depth from which repeated vertices are found by scanning the branch
    /// instead of the membership marks.
    pub scan_depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CTreeOutcome {
    /// Distinct cycles under the bound, each from its first root.
    pub cycles: Vec<CycleCandidate>,
    pub nodes: u64,
    pub complete: bool,
}

impl CTree {
    pub fn new(n: usize, roots: Vec<usize>, node_budget: u64, time_limit: Duration) -> Self {
        let lg = floor_log2(n).max(1);
        CTree {
            roots,
            node_budget,
            time_limit,
            scan_depth: (n / lg).max(1),
        }
    }

    /// Every simple cycle through a root whose branch prefixes all stay
    /// below `bound` and whose closing value is below it. A branch is cut
    /// once its value plus the shortest distance back to the root reaches
    /// the bound; `r` must have no negative cycle.
    pub fn search(&self, r: &ReducedMatrix, bound: Cost) -> CTreeOutcome {
        let n = r.n();
        let mut out = CTreeOutcome {
            complete: true,
            ..Default::default()
        };
        if bound <= Cost::ZERO {
            return out;
        }
        let started = Instant::now();
        let sp = floyd_warshall(r);
        let dist: Vec<Cost> = (0..n * n).map(|k| sp.value(k / n, k % n)).collect();
        let mut seen = HashSet::new();
        let mut marks = vec![false; n];
        let mut branch: Vec<(usize, Cost)> = Vec::with_capacity(n);
        for &root in &self.roots {
            marks[root] = true;
            branch.push((root, Cost::ZERO));
            let ok = self.grow(
                r,
                &dist,
                bound,
                &mut branch,
                &mut marks,
                &mut seen,
                &mut out,
                started,
            );
            branch.pop();
            marks[root] = false;
            if !ok {
                out.complete = false;
                break;
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn grow(
        &self,
        r: &ReducedMatrix,
        dist: &[Cost],
        bound: Cost,
        branch: &mut Vec<(usize, Cost)>,
        marks: &mut [bool],
        seen: &mut HashSet<Vec<usize>>,
        out: &mut CTreeOutcome,
        started: Instant,
    ) -> bool {
        out.nodes += 1;
        if out.nodes > self.node_budget
            || (out.nodes.is_multiple_of(4096) && started.elapsed() > self.time_limit)
        {
            return false;
        }
        let (root, _) = branch[0];
        let &(last, value) = branch.last().expect("non-empty branch");
        let depth = branch.len();
        if depth >= 2 {
            let closed = value + r.get(last, root);
            if closed < bound {
                let vertices: Vec<usize> = branch.iter().map(|&(v, _)| v).collect();
                let cand = CycleCandidate::from_reduced(r, vertices);
                if seen.insert(cand.canonical()) {
                    out.cycles.push(cand);
                }
            }
        }
        for next in 0..r.n() {
            if next == root || next == last {
                continue;
            }
            let v = value + r.get(last, next);
            if v >= bound || v + dist[next * r.n() + root] >= bound {
                continue;
            }
            let repeated = if depth < self.scan_depth {
                marks[next]
            } else {
                branch.iter().any(|&(u, _)| u == next)
            };
            if repeated {
                continue;
            }
            marks[next] = true;
            branch.push((next, v));
            let ok = self.grow(r, dist, bound, branch, marks, seen, out, started);
            branch.pop();
            marks[next] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Vertices with an out-arc below `bound`, ordered with `preferred` first.
pub fn ctree_roots(r: &ReducedMatrix, bound: Cost, preferred: &[usize]) -> Vec<usize> {
    let n = r.n();
    let has_low_arc = |i: usize| (0..n).any(|k| k != i && r.get(i, k) < bound);
    let mut roots = Vec::new();
    for &v in preferred {
        if has_low_arc(v) && !roots.contains(&v) {
            roots.push(v);
        }
    }
    for v in 0..n {
        if has_low_arc(v) && !roots.contains(&v) {
            roots.push(v);
        }
    }
    roots
}

/// Everything Phase 3 produced.
#[derive(Clone, Debug)]
pub struct Phase3Outcome {
    pub bounds: BoundState,
    pub certificate: Certificate,
    pub fw_cycles: Vec<CycleCandidate>,
    pub ctree_cycles: usize,
    pub ctree_nodes: u64,
    pub ctree_complete: bool,
    pub cap_binding: bool,
    pub products_complete: bool,
    pub events: Vec<String>,
}

pub fn phase3_run(
    m: &CostMatrix,
    trace: &GreedyTrace,
    ap: &Permutation,
    phase1: &Phase1Params,
    params: &Phase3Params,
) -> Result<Phase3Outcome> {
    let mut events = Vec::new();
    let mut bounds = initial_tour(trace, ap, m, phase1, params, &mut events)?;
    let mut out = Phase3Outcome {
        bounds: bounds.clone(),
        certificate: Certificate::OptimalProven,
        fw_cycles: Vec::new(),
        ctree_cycles: 0,
        ctree_nodes: 0,
        ctree_complete: true,
        cap_binding: false,
        products_complete: true,
        events: Vec::new(),
    };
    if bounds.m <= Cost::ZERO {
        if params.trace {
            events.push("assignment is a tour".to_string());
        }
        out.events = events;
        return Ok(out);
    }
    let r = ReducedMatrix::new(m, ap);
    let bound_i64 = bounds.m.finite().unwrap_or(i64::MAX);
    let search = enumerate_bounded_cycles(&r, bound_i64, params.trace, |_| bound_i64);
    if params.trace {
        events.extend(search.state.events().iter().map(|e| {
            format!(
                "iteration {} column {}: {}",
                e.iteration,
                e.column + 1,
                e.line()
            )
        }));
        events.push(format!(
            "cycles below {}: {}",
            bounds.m,
            list_cycles(&search.cycles)
        ));
    }
    let fw_cycles = search.cycles;
    let first = improve_by_products(
        &mut bounds,
        &fw_cycles,
        ap,
        params.product_cap,
        params.node_budget,
    );
    if first.improved && params.trace {
        events.push(format!(
            "tour {}  {}  m = {}",
            bounds.best_tour, bounds.best_value, bounds.m
        ));
    }

    let mut preferred = Vec::new();
    for c in &fw_cycles {
        if let Some(d) = c.determining_rotation_below(bounds.m) {
            preferred.push(d);
        }
    }
    let roots = ctree_roots(&r, bounds.m, &preferred);
    let tree = CTree::new(m.n(), roots, params.node_budget, params.time_limit);
    let grown = tree.search(&r, bounds.m);
    let mut all = fw_cycles.clone();
    let known: HashSet<Vec<usize>> = all.iter().map(CycleCandidate::canonical).collect();
    let fresh: Vec<CycleCandidate> = grown
        .cycles
        .into_iter()
        .filter(|c| !known.contains(&c.canonical()))
        .collect();
    out.ctree_cycles = fresh.len();
    all.extend(fresh);
    let second = improve_by_products(
        &mut bounds,
        &all,
        ap,
        params.product_cap,
        params.node_budget,
    );
    if params.trace {
        events.push(format!(
            "c-trees: {} roots, {} nodes, {} new cycles{}",
            tree.roots.len(),
            grown.nodes,
            out.ctree_cycles,
            if grown.complete {
                ""
            } else {
                ", budget exhausted"
            }
        ));
        if second.improved {
            events.push(format!(
                "tour {}  {}  m = {}",
                bounds.best_tour, bounds.best_value, bounds.m
            ));
        }
    }
    out.cap_binding = second.cap_binding;
    out.ctree_nodes = grown.nodes;
    out.ctree_complete = grown.complete;
    out.products_complete = second.complete;
    out.certificate =
        if bounds.m <= Cost::ZERO || (grown.complete && second.complete && !second.cap_binding) {
            Certificate::OptimalProven
        } else {
            Certificate::BudgetExhausted
        };
    if params.trace {
        events.push(format!("certificate {}", out.certificate));
    }
    out.bounds = bounds;
    out.fw_cycles = fw_cycles;
    out.events = events;
    Ok(out)
}

fn list_cycles(cycles: &[CycleCandidate]) -> String {
    if cycles.is_empty() {
        return "none".to_string();
    }
    cycles
        .iter()
        .map(|c| format!("{c} {}", c.total))
        .collect::<Vec<_>>()
        .join(", ")
}
