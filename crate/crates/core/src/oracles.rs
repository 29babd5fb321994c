//! Independent reference solvers used to check the cycle-canceling engine.
//!
//! None of these share code with the solver beyond the matrix and
//! permutation types. Size gates are hard errors.

use crate::cost::Cost;
use crate::cycle::CycleCandidate;
use crate::error::{Error, Result};
use crate::matrix::{CostMatrix, ReducedMatrix};
use crate::perm::Permutation;

pub const BRUTE_AP_LIMIT: usize = 10;
pub const HELD_KARP_LIMIT: usize = 15;
pub const BRUTE_TSP_LIMIT: usize = 10;

fn gate(oracle: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OracleGate { oracle, n, limit });
    }
    Ok(())
}

/// Optimal assignment by exhaustive search with branch-and-bound.
pub fn brute_ap(m: &CostMatrix) -> Result<(Cost, Option<Permutation>)> {
    let n = m.n();
    gate("brute_ap", n, BRUTE_AP_LIMIT)?;
    let mut best = (Cost::Infinite, None);
    let mut map = vec![0; n];
    let mut used = vec![false; n];
    fn rec(
        m: &CostMatrix,
        row: usize,
        acc: Cost,
        map: &mut [usize],
        used: &mut [bool],
        best: &mut (Cost, Option<Vec<usize>>),
    ) {
        if acc >= best.0 {
            return;
        }
        if row == map.len() {
            *best = (acc, Some(map.to_vec()));
            return;
        }
        for j in 0..map.len() {
            let c = m.get(row, j);
            if used[j] || c.is_infinite() {
                continue;
            }
            used[j] = true;
            map[row] = j;
            rec(m, row + 1, acc + c, map, used, best);
            used[j] = false;
        }
    }
    let mut raw = (Cost::Infinite, None);
    rec(m, 0, Cost::ZERO, &mut map, &mut used, &mut raw);
    if let (c, Some(images)) = raw {
        best = (c, Some(Permutation::from_images(images)?));
    }
    Ok(best)
}

/// Optimal assignment by the Hungarian method with potentials, `O(n^3)`.
pub fn hungarian(m: &CostMatrix) -> (Cost, Option<Permutation>) {
    let n = m.n();
    let finite_abs: i64 = (0..n)
        .flat_map(|i| m.row(i).iter())
        .filter_map(|c| c.finite())
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    let big = (finite_abs + 1).saturating_mul(n as i64 + 1);
    let a = |i: usize, j: usize| m.get(i - 1, j - 1).finite().unwrap_or(big);
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = a(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut images = vec![0; n];
    for j in 1..=n {
        images[p[j] - 1] = j - 1;
    }
    let perm = Permutation::from_images(images).expect("hungarian yields a permutation");
    match perm.cost(m) {
        Ok(c) if c.is_finite() => (c, Some(perm)),
        _ => (Cost::Infinite, None),
    }
}

/// Optimal tour by Held–Karp dynamic programming over subsets.
pub fn held_karp(m: &CostMatrix) -> Result<(Cost, Option<Permutation>)> {
    let n = m.n();
    gate("held_karp", n, HELD_KARP_LIMIT)?;
    if n < 2 {
        return Ok((Cost::Infinite, None));
    }
    // subsets of {1..n-1}; vertex 0 is the fixed origin
    let k = n - 1;
    let full = 1usize << k;
    let mut dp = vec![Cost::Infinite; full * k];
    let mut parent = vec![usize::MAX; full * k];
    for v in 0..k {
        dp[(1 << v) * k + v] = m.get(0, v + 1);
    }
    for set in 1..full {
        for last in 0..k {
            let cur = dp[set * k + last];
            if set & (1 << last) == 0 || cur.is_infinite() {
                continue;
            }
            for next in 0..k {
                if set & (1 << next) != 0 {
                    continue;
                }
                let c = cur + m.get(last + 1, next + 1);
                let at = (set | 1 << next) * k + next;
                if c < dp[at] {
                    dp[at] = c;
                    parent[at] = last;
                }
            }
        }
    }
    let all = full - 1;
    let (mut best, mut end) = (Cost::Infinite, usize::MAX);
    for last in 0..k {
        let c = dp[all * k + last] + m.get(last + 1, 0);
        if c < best {
            best = c;
            end = last;
        }
    }
    if best.is_infinite() {
        return Ok((best, None));
    }
    let mut order = Vec::with_capacity(n);
    let (mut set, mut cur) = (all, end);
    while cur != usize::MAX {
        order.push(cur + 1);
        let prev = parent[set * k + cur];
        set &= !(1 << cur);
        cur = prev;
    }
    order.push(0);
    order.reverse();
    Ok((best, Some(Permutation::n_cycle(&order)?)))
}

/// Optimal tour by enumerating every tour through vertex 0.
pub fn brute_tsp(m: &CostMatrix) -> Result<(Cost, Option<Permutation>)> {
    let n = m.n();
    gate("brute_tsp", n, BRUTE_TSP_LIMIT)?;
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: (Cost, Option<Vec<usize>>) = (Cost::Infinite, None);
    fn rec(m: &CostMatrix, k: usize, rest: &mut [usize], best: &mut (Cost, Option<Vec<usize>>)) {
        if k == rest.len() {
            let mut order = vec![0];
            order.extend_from_slice(rest);
            let c: Cost = (0..order.len())
                .map(|t| m.get(order[t], order[(t + 1) % order.len()]))
                .sum();
            if c < best.0 {
                *best = (c, Some(order));
            }
            return;
        }
        for t in k..rest.len() {
            rest.swap(k, t);
            rec(m, k + 1, rest, best);
            rest.swap(k, t);
        }
    }
    if n >= 2 {
        rec(m, 0, &mut rest, &mut best);
    }
    Ok(match best {
        (c, Some(order)) if c.is_finite() => (c, Some(Permutation::n_cycle(&order)?)),
        _ => (Cost::Infinite, None),
    })
}

/// Bellman–Ford distances from `source`, with a flag for a negative cycle
/// reachable from it.
pub fn bellman_ford(r: &ReducedMatrix, source: usize) -> (Vec<Cost>, bool) {
    let n = r.n();
    let mut dist = vec![Cost::Infinite; n];
    dist[source] = Cost::ZERO;
    let relax = |dist: &mut Vec<Cost>| {
        let mut changed = false;
        for i in 0..n {
            if dist[i].is_infinite() {
                continue;
            }
            for k in 0..n {
                if i == k {
                    continue;
                }
                let c = dist[i] + r.get(i, k);
                if c < dist[k] {
                    dist[k] = c;
                    changed = true;
                }
            }
        }
        changed
    };
    for _ in 0..n.saturating_sub(1) {
        if !relax(&mut dist) {
            return (dist, false);
        }
    }
    let negative = relax(&mut dist.clone());
    (dist, negative)
}

/// Whether any negative cycle exists, using a virtual source joined to
/// every vertex by a zero arc.
pub fn has_negative_cycle(r: &ReducedMatrix) -> bool {
    let n = r.n();
    let mut dist = vec![Cost::ZERO; n];
    for round in 0..=n {
        let mut changed = false;
        for i in 0..n {
            for k in 0..n {
                if i == k {
                    continue;
                }
                let c = dist[i] + r.get(i, k);
                if c < dist[k] {
                    dist[k] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            return false;
        }
        if round == n {
            return true;
        }
    }
    true
}

/// Every simple cycle of at most `max_len` vertices with value below
/// `bound`, each listed once from its smallest vertex.
pub fn enumerate_cycles_upto(r: &ReducedMatrix, max_len: usize, bound: i64) -> Vec<CycleCandidate> {
    let n = r.n();
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on = vec![false; n];
    fn rec(
        r: &ReducedMatrix,
        max_len: usize,
        bound: i64,
        path: &mut Vec<usize>,
        on: &mut [bool],
        out: &mut Vec<CycleCandidate>,
    ) {
        let root = path[0];
        let last = *path.last().expect("non-empty path");
        if path.len() >= 2 {
            let c = r.cycle_value(path);
            if c.lt(bound) {
                out.push(CycleCandidate::from_reduced(r, path.clone()));
            }
        }
        if path.len() == max_len {
            return;
        }
        for next in root + 1..r.n() {
            if on[next] || r.get(last, next).is_infinite() {
                continue;
            }
            on[next] = true;
            path.push(next);
            rec(r, max_len, bound, path, on, out);
            path.pop();
            on[next] = false;
        }
    }
    for root in 0..n {
        path.push(root);
        on[root] = true;
        rec(r, max_len, bound, &mut path, &mut on, &mut out);
        on[root] = false;
        path.pop();
    }
    out
}

/// Rotation offsets of a cycle whose every prefix sum is negative, found by
/// scanning all rotations.
pub fn negative_prefix_rotations(arc_values: &[Cost]) -> Vec<usize> {
    let len = arc_values.len();
    (0..len)
        .filter(|&k| {
            let mut acc = Cost::ZERO;
            (0..len).all(|t| {
                acc = acc + arc_values[(k + t) % len];
                acc.is_negative()
            })
        })
        .collect()
}

/// First rotation offset whose prefix sums are all negative, or `None` when
/// the total is not negative.
pub fn theorem1_check(weights: &[i64]) -> Option<usize> {
    let costs: Vec<Cost> = weights.iter().map(|&w| Cost::Finite(w)).collect();
    negative_prefix_rotations(&costs).first().copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example_optima() {
        let m = example1::matrix();
        assert_eq!(brute_ap(&m).unwrap().0, Cost::Finite(155));
        assert_eq!(hungarian(&m).0, Cost::Finite(155));
        let (c, t) = held_karp(&m).unwrap();
        assert_eq!(c, Cost::Finite(161));
        assert!(t.unwrap().is_tour());
        assert_eq!(brute_tsp(&m).unwrap().0, Cost::Finite(161));
    }

    #[test]
    fn gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = CostMatrix::random(16, 1, 9, &mut rng);
        assert!(matches!(held_karp(&m), Err(Error::OracleGate { .. })));
        assert!(matches!(brute_ap(&m), Err(Error::OracleGate { .. })));
    }

    #[test]
    fn hungarian_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8 {
            let m = CostMatrix::random(n, 0, 50, &mut rng);
            assert_eq!(hungarian(&m).0, brute_ap(&m).unwrap().0, "n = {n}");
            assert_eq!(
                held_karp(&m).unwrap().0,
                brute_tsp(&m).unwrap().0,
                "n = {n}"
            );
        }
    }

    #[test]
    fn example_cycle_census() {
        let m = example1::matrix();
        let r = ReducedMatrix::new(&m, &example1::d3());
        assert!(enumerate_cycles_upto(&r, 8, 6).is_empty());
        assert_eq!(enumerate_cycles_upto(&r, 8, 40).len(), 31);
        assert!(!has_negative_cycle(&r));
    }

    #[test]
    fn rotation_scan() {
        assert_eq!(theorem1_check(&[-30, -23, 31]), Some(0));
        assert_eq!(theorem1_check(&[1, -1]), None);
        let v: Vec<Cost> = [1, -11].iter().map(|&x| Cost::Finite(x)).collect();
        assert_eq!(negative_prefix_rotations(&v), vec![1]);
        let z: Vec<Cost> = [1, -1].iter().map(|&x| Cost::Finite(x)).collect();
        assert!(negative_prefix_rotations(&z).is_empty());
    }
}
