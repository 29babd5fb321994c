use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tspcc::fw::{
    enumerate_bounded_cycles, find_negative_cycle, floyd_warshall, search_negative_cycle,
};
use tspcc::greedy::admissible;
use tspcc::oracles::{bellman_ford, enumerate_cycles_upto, has_negative_cycle, hungarian};
use tspcc::{example1, Cost, CostMatrix, CycleCandidate, Permutation, ReducedMatrix};

fn sparse(n: usize, arcs: &[(usize, usize, i64)]) -> ReducedMatrix {
    let mut v = vec![Cost::Infinite; n * n];
    for &(a, b, w) in arcs {
        v[(a - 1) * n + (b - 1)] = Cost::Finite(w);
    }
    ReducedMatrix::from_values(n, v).unwrap()
}

const CHAIN: [(usize, usize, i64); 5] =
    [(1, 3, 5), (3, 7, -2), (1, 7, 25), (7, 10, -5), (1, 10, 7)];

#[test]
fn chain_distances_and_closing_arc() {
    let r = sparse(10, &CHAIN);
    let (dist, neg) = bellman_ford(&r, 0);
    assert_eq!(dist[9], Cost::Finite(-2));
    assert!(!neg);
    let st = floyd_warshall(&r);
    assert_eq!(st.value(0, 9), Cost::Finite(-2));
    assert_eq!(st.reconstruct_path(0, 9).unwrap(), vec![0, 2, 6, 9]);

    let mut arcs = CHAIN.to_vec();
    arcs.push((10, 1, 1));
    let closed = sparse(10, &arcs);
    assert!(bellman_ford(&closed, 0).1);
    let c = find_negative_cycle(&closed).unwrap();
    assert_eq!(c.canonical(), vec![0, 2, 6, 9]);
    assert_eq!(c.total, Cost::Finite(-1));
}

#[test]
fn optimal_assignment_has_no_negative_cycle() {
    let m = example1::matrix();
    let r = ReducedMatrix::new(&m, &example1::d3());
    assert!(!has_negative_cycle(&r));
    assert!(find_negative_cycle(&r).is_none());
}

#[test]
fn undone_exchange_is_found_again() {
    // D1 = D0 (5 6 4); the start tour admits the -22 cycle
    let m = example1::matrix();
    let d0 = example1::start_tour();
    let r = ReducedMatrix::new(&m, &d0);
    assert_eq!(r.cycle_value(&[4, 5, 3]), Cost::Finite(-22));
    let c = find_negative_cycle(&r).unwrap();
    assert!(c.total.is_negative());
    let listed = enumerate_cycles_upto(&r, 8, 0);
    assert!(listed.iter().any(|x| x.canonical() == c.canonical()));
}

#[test]
fn canceling_changes_cost_by_cycle_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.gen_range(4..=10);
        let m = CostMatrix::random(n, 1, 100, &mut rng);
        let p = Permutation::random_tour(n, &mut rng);
        let r = ReducedMatrix::new(&m, &p);
        if let Some(c) = find_negative_cycle(&r) {
            assert!(admissible(&c.vertices, &p));
            let q = p.apply_cycle(&c.vertices);
            assert_eq!(q.cost(&m).unwrap(), p.cost(&m).unwrap() + c.total);
            assert!(q.is_derangement());
        }
    }
}

#[test]
fn bounded_enumeration_is_sound() {
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=8);
        let m = CostMatrix::random(n, 1, 60, &mut rng);
        let (_, p) = hungarian(&m);
        let r = ReducedMatrix::new(&m, &p.unwrap());
        let bound = 40;
        let oracle: Vec<Vec<usize>> = enumerate_cycles_upto(&r, n, bound)
            .iter()
            .map(CycleCandidate::canonical)
            .collect();
        let got = enumerate_bounded_cycles(&r, bound, false, |_| bound);
        for c in &got.cycles {
            assert!(c.total.lt(bound));
            assert!(oracle.contains(&c.canonical()), "seed {seed}: {c}");
        }
        // with no negative arc, every 2-cycle below the bound is met directly
        if (0..n * n).all(|k| !r.get(k / n, k % n).is_negative()) {
            for c in enumerate_cycles_upto(&r, 2, bound) {
                assert!(
                    got.cycles.iter().any(|g| g.canonical() == c.canonical()),
                    "seed {seed}: {c}"
                );
            }
        }
    }
}

#[test]
fn search_respects_iteration_limit() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=12);
        let m = CostMatrix::random(n, 1, 100, &mut rng);
        let p = Permutation::random_tour(n, &mut rng);
        let s = search_negative_cycle(&ReducedMatrix::new(&m, &p), false);
        assert!(s.state.iteration < n);
        if let Some(f) = s.found {
            assert!(f.iteration < n);
        }
    }
}

#[test]
fn negative_index_tracks_sweep_boundary() {
    let m = example1::matrix();
    let r = ReducedMatrix::new(&m, &example1::d3());
    let s = search_negative_cycle(&r, false);
    let idx = s.state.negative_index();
    let col6: Vec<(Cost, usize)> = idx.column(5).collect();
    assert_eq!(
        col6,
        vec![
            (Cost::Finite(-5), 0),
            (Cost::Finite(-5), 6),
            (Cost::Finite(-1), 3)
        ]
    );
    assert_eq!(idx.len(), 5);
}

#[test]
fn reconstruction_matches_values() {
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=16);
        let m = CostMatrix::random(n, 1, 100, &mut rng);
        let (_, p) = hungarian(&m);
        let r = ReducedMatrix::new(&m, &p.unwrap());
        let st = floyd_warshall(&r);
        for i in 0..n {
            for k in (0..n).filter(|&k| k != i) {
                let walk = st.reconstruct_path(i, k).unwrap();
                assert_eq!((walk[0], *walk.last().unwrap()), (i, k));
                assert_eq!(st.walk_value(&walk), st.value(i, k));
                let mut sorted = walk.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), walk.len(), "walk is simple");
            }
        }
    }
}
