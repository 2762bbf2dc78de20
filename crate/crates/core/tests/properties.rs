use natpart::builders::{build_parity_sets, WeightSequence};
use natpart::intset::{digit_sum_2, BoundedSet};
use natpart::repfn::{profile, r1, r2, r2_profile, r2_profile_naive, r3, r_cross, Variant};
use proptest::prelude::*;

fn bounded_set() -> impl Strategy<Value = BoundedSet> {
    (1usize..300).prop_flat_map(|bound| {
        proptest::collection::vec(0..bound, 0..bound).prop_map(move |xs| BoundedSet::from_elements(bound, xs).unwrap())
    })
}

fn set_pair() -> impl Strategy<Value = (BoundedSet, BoundedSet)> {
    (1usize..200).prop_flat_map(|bound| {
        let one = proptest::collection::vec(0..bound, 0..bound);
        (one.clone(), one).prop_map(move |(x, y)| {
            (BoundedSet::from_elements(bound, x).unwrap(), BoundedSet::from_elements(bound, y).unwrap())
        })
    })
}

proptest! {
    #[test]
    fn literal_round_trip(s in bounded_set()) {
        let parsed: BoundedSet = s.to_string().parse().unwrap();
        prop_assert_eq!(parsed, s);
    }

    #[test]
    fn ordered_count_splits_into_strict_and_weak(s in bounded_set(), k in 0usize..300) {
        let n = k % s.bound();
        prop_assert_eq!(r1(&s, n).unwrap(), r2(&s, n).unwrap() + r3(&s, n).unwrap());
    }

    #[test]
    fn cross_count_is_symmetric((s, w) in set_pair(), k in 0usize..200) {
        let n = k % s.bound();
        prop_assert_eq!(r_cross(&s, &w, n).unwrap(), r_cross(&w, &s, n).unwrap());
        prop_assert_eq!(r_cross(&s, &s, n).unwrap(), r1(&s, n).unwrap());
    }

    #[test]
    fn truncation_is_a_prefix(s in bounded_set(), k in 0usize..300) {
        let x = k % s.bound();
        let t = s.truncate(x).unwrap();
        prop_assert!(t.is_subset(&s).unwrap());
        prop_assert!(t.iter().all(|e| e <= x));
        prop_assert_eq!(t.len(), s.iter().filter(|&e| e <= x).count());
    }

    #[test]
    fn kernel_matches_pointwise(s in bounded_set()) {
        let n_max = s.bound() - 1;
        prop_assert_eq!(r2_profile(&s, n_max).unwrap(), r2_profile_naive(&s, n_max).unwrap());
        let p1 = profile(&s, Variant::R1, n_max).unwrap();
        let p3 = profile(&s, Variant::R3, n_max).unwrap();
        for n in 0..=n_max {
            prop_assert_eq!(p1.values[n], r1(&s, n).unwrap());
            prop_assert_eq!(p3.values[n], r3(&s, n).unwrap());
        }
    }

    #[test]
    fn set_algebra_laws((s, w) in set_pair()) {
        let union = s.union(&w).unwrap();
        let meet = s.intersection(&w).unwrap();
        prop_assert_eq!(union.len() + meet.len(), s.len() + w.len());
        prop_assert_eq!(s.difference(&w).unwrap(), s.intersection(&w.complement()).unwrap());
        prop_assert!(s.is_disjoint(&s.complement()).unwrap());
        prop_assert_eq!(s.union(&s.complement()).unwrap(), BoundedSet::full(s.bound()));
    }

    #[test]
    fn shift_then_unshift(s in bounded_set(), a in 0usize..50) {
        let (up, dropped) = s.shift(a);
        prop_assert_eq!(up.len() + dropped, s.len());
        prop_assert!(up.iter().all(|e| e >= a && s.contains(e - a)));
    }

    #[test]
    fn digit_sum_recurrence(n in 0u64..(1 << 40)) {
        prop_assert_eq!(digit_sum_2(2 * n), digit_sum_2(n));
        prop_assert_eq!(digit_sum_2(2 * n + 1), digit_sum_2(n) + 1);
        prop_assert_eq!(digit_sum_2(n), n.count_ones());
    }

    #[test]
    fn parity_sets_of_distinct_powers_partition(l in 0u32..8) {
        // Weights 1, 2, ..., 2^(l-1) give every number below 2^l exactly once.
        let weights: Vec<usize> = (0..l).map(|j| 1 << j).collect();
        let bound = 1usize << l;
        let rep = build_parity_sets(&WeightSequence::explicit(weights).unwrap(), bound);
        prop_assert!(rep.ambiguous.is_empty());
        prop_assert_eq!(rep.even_set.union(&rep.odd_set).unwrap(), BoundedSet::full(bound));
        for n in 0..bound {
            prop_assert_eq!(rep.even_set.contains(n), n.count_ones() % 2 == 0);
        }
    }
}
