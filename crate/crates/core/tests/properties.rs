use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tspcc::oracles::{brute_ap, hungarian, theorem1_check};
use tspcc::{Cost, CostMatrix, CycleCandidate, Permutation, ReducedMatrix};

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn sized_pair() -> impl Strategy<Value = (Permutation, Permutation)> {
    (1usize..12).prop_flat_map(|n| (perm(n), perm(n)))
}

proptest! {
    #[test]
    fn inverse_composes_to_identity(p in (1usize..15).prop_flat_map(perm)) {
        let id = Permutation::identity(p.n());
        prop_assert_eq!(p.compose(&p.inverse()).unwrap(), id.clone());
        prop_assert_eq!(p.inverse().compose(&p).unwrap(), id);
    }

    #[test]
    fn composition_applies_right_first((p, q) in sized_pair()) {
        let r = p.compose(&q).unwrap();
        for i in 0..p.n() {
            prop_assert_eq!(r.image(i), p.image(q.image(i)));
        }
    }

    #[test]
    fn cycle_notation_round_trips(p in (1usize..15).prop_flat_map(perm)) {
        let text = p.to_string();
        prop_assert_eq!(Permutation::parse_cycles(&text, p.n()).unwrap(), p.clone());
        let form = p.decompose();
        let moved: usize = form.cycles.iter().map(Vec::len).sum();
        prop_assert_eq!(moved + form.fixed_points.len(), p.n());
        prop_assert_eq!(p.is_tour(), form.cycles.len() == 1 && form.fixed_points.is_empty());
    }

    #[test]
    fn rotation_exists_for_negative_totals(w in prop::collection::vec(-60i64..60, 2..13)) {
        let total: i64 = w.iter().sum();
        match theorem1_check(&w) {
            Some(k) => {
                prop_assert!(total < 0);
                let mut acc = 0;
                for t in 0..w.len() {
                    acc += w[(k + t) % w.len()];
                    prop_assert!(acc < 0);
                }
            }
            None => prop_assert!(total >= 0),
        }
        let c = CycleCandidate::new((0..w.len()).collect(), w.iter().map(|&x| Cost::Finite(x)).collect());
        prop_assert_eq!(c.determining_rotation().is_some(), total < 0);
    }

    #[test]
    fn bounded_rotation_keeps_prefixes_below(w in prop::collection::vec(-20i64..40, 2..10), slack in 1i64..30) {
        let total: i64 = w.iter().sum();
        let bound = total.max(0) + slack;
        let c = CycleCandidate::new((0..w.len()).collect(), w.iter().map(|&x| Cost::Finite(x)).collect());
        let start = c.determining_rotation_below(Cost::Finite(bound)).unwrap();
        let mut acc = 0;
        for t in 0..w.len() {
            acc += w[(start + t) % w.len()];
            prop_assert!(acc < bound);
        }
    }

    #[test]
    fn reduced_cycle_value_is_cost_change(seed in any::<u64>(), n in 3usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CostMatrix::random(n, 1, 100, &mut rng);
        let p = Permutation::random_tour(n, &mut rng);
        let r = ReducedMatrix::new(&m, &p);
        let cyc: Vec<usize> = (0..n).step_by(2).collect();
        if cyc.len() >= 2 {
            let q = p.apply_cycle(&cyc);
            prop_assert_eq!(q.cost(&m).unwrap(), p.cost(&m).unwrap() + r.cycle_value(&cyc));
        }
    }

    #[test]
    fn hungarian_agrees_with_brute_force(seed in any::<u64>(), n in 2usize..8) {
        let m = CostMatrix::random(n, 0, 40, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(hungarian(&m).0, brute_ap(&m).unwrap().0);
    }

    #[test]
    fn matrix_text_round_trips(seed in any::<u64>(), n in 1usize..9) {
        let m = CostMatrix::random(n, -50, 50, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(CostMatrix::parse(&m.to_text()).unwrap(), m);
    }
}
