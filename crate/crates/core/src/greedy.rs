//! Greedy negative-cycle construction from a random tour.
//!
//! Each trial walks from a start vertex along the cheapest columns of the
//! cost matrix, mapped back through the current derangement, while the
//! running sum stays negative. Every closing cycle met on the way is
//! evaluated and the best admissible move is applied. This repeats until
//! no trial produces a negative cycle.

use std::collections::HashSet;

use crate::cost::Cost;
use crate::cycle::{move_order, CycleCandidate};
use crate::error::{Error, Result};
use crate::matrix::{diff, CostMatrix, MinOrderTable};
use crate::perm::{cycle_notation, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase1Params {
    /// Column ranks tried per vertex, `floor(log2 n) + 1` by default.
    pub rank_budget: usize,
    /// Negative-DIFF start vertices tried per round, `ceil(log2 n)` by default.
    pub start_budget: usize,
    /// Evaluate every start of a round before applying the best move, instead
    /// of applying the first start's best negative move.
    pub sweep_all_starts: bool,
    /// Record trace event lines.
    pub trace: bool,
}

impl Phase1Params {
    pub fn for_size(n: usize) -> Self {
        Phase1Params {
            rank_budget: floor_log2(n) + 1,
            start_budget: ceil_log2(n).max(1),
            sweep_all_starts: false,
            trace: false,
        }
    }
}

pub fn floor_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        floor_log2(n - 1) + 1
    }
}

/// One applied move: a single cycle or a product of disjoint cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyStep {
    pub start: usize,
    pub cycles: Vec<CycleCandidate>,
    pub total: Cost,
}

#[derive(Clone, Debug, Default)]
pub struct GreedyTrace {
    /// `D0, D1, .., Dr`; `D0` is the starting tour.
    pub derangements: Vec<Permutation>,
    pub costs: Vec<Cost>,
    /// `steps[h]` turns `derangements[h]` into `derangements[h + 1]`.
    pub steps: Vec<GreedyStep>,
    /// Every admissible negative cycle met, deduplicated by canonical rotation.
    pub bag: Vec<CycleCandidate>,
    pub diff_tables: Vec<Vec<Cost>>,
    pub events: Vec<String>,
}

impl GreedyTrace {
    pub fn last(&self) -> &Permutation {
        self.derangements
            .last()
            .expect("trace holds the starting tour")
    }

    pub fn last_cost(&self) -> Cost {
        *self.costs.last().expect("trace holds the starting tour")
    }
}

/// No arc `(a, b)` of the cycle has `p(b) = a`; equivalently `p` composed
/// with the cycle is still a derangement when `p` is.
pub fn admissible(cycle: &[usize], p: &Permutation) -> bool {
    cycle
        .iter()
        .zip(cycle.iter().cycle().skip(1))
        .all(|(&a, &b)| p.image(b) != a)
}

/// Read-only state shared by the trials of one round.
pub struct WalkContext<'a> {
    pub m: &'a CostMatrix,
    pub order: &'a MinOrderTable,
    pub p: &'a Permutation,
    pub p_inv: &'a Permutation,
    pub rank_budget: usize,
}

impl WalkContext<'_> {
    fn arc(&self, a: usize, b: usize) -> Cost {
        if a == b {
            return Cost::ZERO;
        }
        self.m.get(a, self.p.image(b)) - self.m.get(a, self.p.image(a))
    }

    /// Cheapest usable step out of `v` other than its current arc.
    fn step(&self, v: usize) -> Option<(usize, usize)> {
        (0..self.rank_budget)
            .filter_map(|k| self.order.nth(v, k))
            .find(|&j| j != self.p.image(v))
            .map(|j| (j, self.p_inv.image(j)))
    }

    fn candidate(&self, vertices: Vec<usize>) -> CycleCandidate {
        let arcs = vertices
            .iter()
            .zip(vertices.iter().cycle().skip(1))
            .map(|(&a, &b)| self.arc(a, b))
            .collect();
        CycleCandidate::new(vertices, arcs)
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, Default)]
pub struct Walk {
    /// Visited vertices, including the final repeated or rejected one.
    pub path: Vec<usize>,
    /// Admissible negative cycles, each rotated to have negative prefixes.
    pub candidates: Vec<CycleCandidate>,
    pub best: Option<Vec<CycleCandidate>>,
    /// The start rank hit the current arc; no later rank can be negative.
    pub hit_current_arc: bool,
}

/// Walks from `start` using column rank `rank` (0-based) for the first arc.
pub fn greedy_walk(
    ctx: &WalkContext<'_>,
    start: usize,
    rank: usize,
    events: &mut Option<&mut Vec<String>>,
) -> Walk {
    let mut log = |s: String| {
        if let Some(ev) = events.as_deref_mut() {
            ev.push(s);
        }
    };
    let mut walk = Walk::default();
    let Some(first_col) = ctx.order.nth(start, rank) else {
        return walk;
    };
    let own = ctx.p.image(start);
    if first_col == own {
        log(format!(
            "({}, {}) → ({0}, {0})  in D",
            start + 1,
            first_col + 1
        ));
        walk.hit_current_arc = true;
        return walk;
    }
    let first = ctx.p_inv.image(first_col);
    let first_val = ctx.arc(start, first);
    log(format!(
        "({}, {}) → ({}, {})  {}",
        start + 1,
        first_col + 1,
        start + 1,
        first + 1,
        first_val
    ));
    if !first_val.is_negative() {
        return walk;
    }

    let mut path = vec![start, first];
    // prefix[k] = sum of the first k arcs of `path`
    let mut prefix = vec![Cost::ZERO, first_val];
    let mut repeat_at = None;
    loop {
        let v = *path.last().expect("path is non-empty");
        let Some((col, w)) = ctx.step(v) else {
            break;
        };
        if ctx.order.rank(v, col) != Some(0) {
            let skipped = ctx.order.nth(v, 0).expect("row has a cheapest column");
            log(format!("({}, {}) → ({0}, {0})  in D", v + 1, skipped + 1));
        }
        let val = ctx.arc(v, w);
        log(format!(
            "({}, {}) → ({}, {})  {}",
            v + 1,
            col + 1,
            v + 1,
            w + 1,
            val
        ));
        let sum = *prefix.last().expect("prefix is non-empty") + val;
        path.push(w);
        if !sum.is_negative() {
            break;
        }
        if let Some(k) = path[..path.len() - 1].iter().position(|&x| x == w) {
            prefix.push(sum);
            repeat_at = Some(k);
            break;
        }
        prefix.push(sum);
    }
    log(format!(
        "P = [{}]",
        path.iter()
            .map(|v| (v + 1).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    ));

    // Distinct prefix of the path, all of whose prefix sums are negative.
    let simple_len = match repeat_at {
        Some(_) => path.len() - 1,
        None => prefix.len().min(path.len()),
    };
    let simple = &path[..simple_len];

    let mut options: Vec<Vec<CycleCandidate>> = Vec::new();
    let consider = |c: CycleCandidate, walk: &mut Walk, log: &mut dyn FnMut(String)| {
        if !admissible(&c.vertices, ctx.p) || c.total.is_infinite() {
            log(format!("cycle {}  not admissible", c));
            return None;
        }
        log(format!("cycle {}  {}", c, c.total));
        if !c.total.is_negative() {
            return None;
        }
        let rotated = c.determining_rotation().expect("negative total");
        walk.candidates.push(rotated.clone());
        Some(rotated)
    };

    for k in 1..simple.len() {
        if let Some(c) = consider(ctx.candidate(simple[..=k].to_vec()), &mut walk, &mut log) {
            options.push(vec![c]);
        }
    }
    if let Some(k) = repeat_at.filter(|&k| k > 0) {
        let suffix = consider(ctx.candidate(simple[k..].to_vec()), &mut walk, &mut log);
        if let Some(s) = &suffix {
            options.push(vec![s.clone()]);
        }
        if k >= 2 {
            let head = ctx.candidate(simple[..k].to_vec());
            if let (Some(s), true) = (
                suffix,
                head.total.is_negative() && admissible(&head.vertices, ctx.p),
            ) {
                let head = head.determining_rotation().expect("negative total");
                log(format!("product {}{}  {}", head, s, head.total + s.total));
                options.push(vec![head, s]);
            }
        }
    }
    walk.best = options.into_iter().min_by(|a, b| move_order(a, b));
    walk.path = path;
    walk
}

/// Runs the greedy phase from the n-cycle `d0`.
pub fn phase1_run(m: &CostMatrix, d0: &Permutation, params: &Phase1Params) -> Result<GreedyTrace> {
    let n = m.n();
    if d0.n() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: d0.n(),
        });
    }
    if !d0.is_tour() {
        return Err(Error::NotATour);
    }
    let order = MinOrderTable::build(m);
    let mut trace = GreedyTrace::default();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut p = d0.clone();
    let mut events: Option<&mut Vec<String>> = None;
    let mut event_buf = Vec::new();
    if params.trace {
        events = Some(&mut event_buf);
    }
    let log = |events: &mut Option<&mut Vec<String>>, s: String| {
        if let Some(ev) = events.as_deref_mut() {
            ev.push(s);
        }
    };

    let mut diffs: Vec<Cost> = (0..n).map(|i| diff(m, &p, &order, i).value).collect();
    loop {
        let h = trace.derangements.len();
        let cost = p.cost(m)?;
        log(&mut events, format!("D{h} = {p}  cost {cost}"));
        log(
            &mut events,
            format!(
                "DIFF = ({})",
                diffs
                    .iter()
                    .map(Cost::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        );
        trace.derangements.push(p.clone());
        trace.costs.push(cost);
        trace.diff_tables.push(diffs.clone());

        let mut starts: Vec<usize> = (0..n).filter(|&i| diffs[i].is_negative()).collect();
        starts.sort_by_key(|&i| (diffs[i], i));
        starts.truncate(params.start_budget);

        let p_inv = p.inverse();
        let ctx = WalkContext {
            m,
            order: &order,
            p: &p,
            p_inv: &p_inv,
            rank_budget: params.rank_budget,
        };
        let mut chosen: Option<(usize, Vec<CycleCandidate>)> = None;
        for &s in &starts {
            let mut best_here: Option<Vec<CycleCandidate>> = None;
            for rank in 0..params.rank_budget {
                let Some(col) = order.nth(s, rank) else { break };
                if col != p.image(s) && m.get(s, col) >= m.get(s, p.image(s)) {
                    break;
                }
                log(&mut events, format!("start {} trial {}", s + 1, rank + 1));
                let walk = greedy_walk(&ctx, s, rank, &mut events);
                for c in &walk.candidates {
                    if seen.insert(c.canonical()) {
                        trace.bag.push(c.clone());
                    }
                }
                if let Some(b) = walk.best {
                    if best_here
                        .as_ref()
                        .is_none_or(|cur| move_order(&b, cur).is_lt())
                    {
                        best_here = Some(b);
                    }
                }
                if walk.hit_current_arc {
                    break;
                }
            }
            if let Some(b) = best_here {
                if chosen
                    .as_ref()
                    .is_none_or(|(_, cur)| move_order(&b, cur).is_lt())
                {
                    chosen = Some((s, b));
                }
                if !params.sweep_all_starts {
                    break;
                }
            }
        }

        let Some((start, cycles)) = chosen else {
            break;
        };
        let total: Cost = cycles.iter().map(|c| c.total).sum();
        let names: String = cycles.iter().map(|c| c.to_string()).collect();
        log(&mut events, format!("apply {names}  {total}"));
        let mut next = p.clone();
        for c in &cycles {
            next = next.apply_cycle(&c.vertices);
        }
        for c in &cycles {
            for &v in &c.vertices {
                diffs[v] = diff(m, &next, &order, v).value;
            }
        }
        trace.steps.push(GreedyStep {
            start,
            cycles,
            total,
        });
        p = next;
    }
    trace.events = event_buf;
    Ok(trace)
}

/// `n`-cycle notation of a cycle move, for reports.
pub fn step_notation(step: &GreedyStep) -> String {
    step.cycles
        .iter()
        .map(|c| cycle_notation(&c.vertices))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;

    fn ctx_parts(p: &Permutation) -> (CostMatrix, MinOrderTable, Permutation) {
        let m = example1::matrix();
        let order = MinOrderTable::build(&m);
        (m, order, p.inverse())
    }

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|x| x + 1).collect()
    }

    #[test]
    fn logs() {
        assert_eq!(floor_log2(8), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(floor_log2(9), 3);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(ceil_log2(2), 1);
        let p = Phase1Params::for_size(8);
        assert_eq!((p.rank_budget, p.start_budget), (4, 3));
    }

    #[test]
    fn admissibility() {
        let d = example1::start_tour();
        assert!(!admissible(&[4, 5], &d));
        assert!(admissible(&[4, 5, 3], &d));
        let p = Permutation::parse_cycles("(1 2)(3 4)", 4).unwrap();
        assert!(!admissible(&[0, 1], &p));
    }

    #[test]
    fn walk_from_5_under_d() {
        let d = example1::start_tour();
        let (m, order, inv) = ctx_parts(&d);
        let ctx = WalkContext {
            m: &m,
            order: &order,
            p: &d,
            p_inv: &inv,
            rank_budget: 4,
        };
        let w = greedy_walk(&ctx, 4, 0, &mut None);
        assert_eq!(one_based(&w.path), vec![5, 6, 4, 1, 4]);
        let best = w.best.unwrap();
        assert_eq!(best.len(), 1);
        assert_eq!(one_based(&best[0].vertices), vec![5, 6, 4]);
        assert_eq!(best[0].total, Cost::Finite(-22));
        assert!(w
            .candidates
            .iter()
            .all(CycleCandidate::all_prefixes_negative));
        let second = greedy_walk(&ctx, 4, 1, &mut None);
        assert!(second.hit_current_arc);
    }

    #[test]
    fn walk_from_4_under_d1_rank_2() {
        let d1 = example1::start_tour().apply_cycle(&[4, 5, 3]);
        let (m, order, inv) = ctx_parts(&d1);
        let ctx = WalkContext {
            m: &m,
            order: &order,
            p: &d1,
            p_inv: &inv,
            rank_budget: 4,
        };
        let w = greedy_walk(&ctx, 3, 1, &mut None);
        assert_eq!(one_based(&w.path), vec![4, 1, 6, 7, 1]);
        let best = w.best.unwrap();
        assert_eq!(one_based(&best[0].vertices), vec![4, 1, 6, 7]);
        assert_eq!(best[0].total, Cost::Finite(-29));
    }

    #[test]
    fn walk_from_6_under_d2() {
        let d2 = Permutation::from_row_form(&[5, 3, 4, 2, 7, 8, 6, 1]).unwrap();
        let (m, order, inv) = ctx_parts(&d2);
        let ctx = WalkContext {
            m: &m,
            order: &order,
            p: &d2,
            p_inv: &inv,
            rank_budget: 4,
        };
        let w = greedy_walk(&ctx, 5, 0, &mut None);
        assert_eq!(one_based(&w.path), vec![6, 1, 3, 8, 7, 4, 1]);
        let best = w.best.unwrap();
        assert_eq!(one_based(&best[0].vertices), vec![6, 1, 3, 8, 7]);
        assert_eq!(best[0].total, Cost::Finite(-7));
        assert!(w
            .candidates
            .iter()
            .any(|c| c.canonical() == vec![0, 2, 7, 6, 3, 5] && c.total == Cost::Finite(-1)));
    }

    #[test]
    fn example_run() {
        let m = example1::matrix();
        let trace = phase1_run(&m, &example1::start_tour(), &Phase1Params::for_size(8)).unwrap();
        let applied: Vec<String> = trace.steps.iter().map(step_notation).collect();
        assert_eq!(applied, vec!["(5 6 4)", "(4 1 6 7)", "(6 1 3 8 7)"]);
        let totals: Vec<Cost> = trace.steps.iter().map(|s| s.total).collect();
        assert_eq!(totals, [-22, -29, -7].map(Cost::Finite).to_vec());
        assert_eq!(trace.last(), &example1::d3());
        assert_eq!(trace.last_cost(), Cost::Finite(155));
        assert_eq!(
            trace.derangements[2].row_form(),
            vec![5, 3, 4, 2, 7, 8, 6, 1]
        );
    }

    #[test]
    fn no_improvement_when_rows_use_their_minimum() {
        // every row's cheapest arc follows the tour (1 2 3 4)
        let m = CostMatrix::from_rows(&[[0, 1, 9, 9], [9, 0, 1, 9], [9, 9, 0, 1], [1, 9, 9, 0]])
            .unwrap();
        let d = Permutation::parse_cycles("(1 2 3 4)", 4).unwrap();
        let trace = phase1_run(&m, &d, &Phase1Params::for_size(4)).unwrap();
        assert_eq!(trace.derangements.len(), 1);
        assert!(trace.diff_tables[0].iter().all(|&v| v == Cost::ZERO));
    }

    #[test]
    fn rejects_non_tour_start() {
        let m = example1::matrix();
        assert_eq!(
            phase1_run(&m, &example1::d3(), &Phase1Params::for_size(8)).unwrap_err(),
            Error::NotATour
        );
    }
}
