//! The forced extension against a slow reference that recomputes every
//! representation count from scratch at each step.

use natpart::intset::ProgressionSpec;
use natpart::solver::{classify_grid, forced_extend, predicted_completed, RRule, Status};

#[derive(Debug, PartialEq, Eq)]
struct Reference {
    a: Vec<usize>,
    b: Vec<usize>,
    contradiction: Option<(usize, usize)>,
}

fn strict_pairs(xs: &[usize], n: usize) -> usize {
    xs.iter().filter(|&&x| 2 * x < n && xs.contains(&(n - x))).count()
}

fn reference(r: usize, m: usize, bound: usize) -> Reference {
    let in_t = |n: usize| n >= r && (n - r).is_multiple_of(m);
    let a0 = (0..).find(|&n| !in_t(n)).unwrap();
    let mut a = vec![a0];
    let mut b = Vec::new();
    for f in a0 + 1..bound {
        let sum = a0 + f;
        if in_t(f) {
            if strict_pairs(&a, sum) != strict_pairs(&b, sum) {
                return Reference { a, b, contradiction: Some((sum, f)) };
            }
            continue;
        }
        let mut with_a = a.clone();
        with_a.push(f);
        if strict_pairs(&with_a, sum) == strict_pairs(&b, sum) {
            a = with_a;
            continue;
        }
        let mut with_b = b.clone();
        with_b.push(f);
        if strict_pairs(&a, sum) == strict_pairs(&with_b, sum) {
            b = with_b;
            continue;
        }
        return Reference { a, b, contradiction: Some((sum, f)) };
    }
    Reference { a, b, contradiction: None }
}

#[test]
fn matches_reference_on_small_grid() {
    const BOUND: usize = 160;
    for m in 2..=12 {
        for r in 0..=2 * m {
            let expected = reference(r, m, BOUND);
            let out = forced_extend(ProgressionSpec::new(r, m).unwrap(), BOUND).unwrap();
            let got = Reference {
                a: out.a.iter().collect(),
                b: out.b.iter().collect(),
                contradiction: out.contradiction.map(|c| (c.sum, c.position)),
            };
            assert_eq!(got, expected, "r={r}, m={m}");
            assert_eq!(out.status == Status::Completed, expected.contradiction.is_none());
        }
    }
}

#[test]
fn contradiction_values_are_out_of_range() {
    for rec in classify_grid(2..=12, RRule::default(), 256).unwrap() {
        let out = forced_extend(ProgressionSpec::new(rec.r, rec.m).unwrap(), 256).unwrap();
        if let Some(c) = out.contradiction {
            assert!(if c.excluded { c.forced_value != 0 } else { !(0..=1).contains(&c.forced_value) });
        }
    }
}

#[test]
fn longer_windows_extend_shorter_ones() {
    for (r, m) in [(2, 3), (0, 5), (8, 17), (3, 7), (1, 4)] {
        let p = ProgressionSpec::new(r, m).unwrap();
        let short = forced_extend(p, 200).unwrap();
        let long = forced_extend(p, 600).unwrap();
        let cut = |xs: &natpart::BoundedSet| xs.iter().take_while(|&x| x < 200).collect::<Vec<_>>();
        assert_eq!(cut(&short.a), cut(&long.a));
        assert_eq!(cut(&short.b), cut(&long.b));
        if !short.is_completed() {
            assert_eq!(short.contradiction, long.contradiction);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let first = classify_grid(2..=17, RRule::default(), 512).unwrap();
    let second = classify_grid(2..=17, RRule::default(), 512).unwrap();
    assert_eq!(first, second);
    let completed: std::collections::BTreeSet<_> =
        first.iter().filter(|c| c.status == Status::Completed).map(|c| (c.r, c.m)).collect();
    assert_eq!(completed, predicted_completed(17, RRule::default()));
}
