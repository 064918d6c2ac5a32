use std::collections::HashSet;

use chipfire::combinatorics::{digit_reversal, kappa, lds, z_lds_closed_form};
use chipfire::search::{collect_stable, count_stable, max_inversions_search, max_lds_search, reachability_fuzz};
use chipfire::{EnumerationSpec, FiringPlan, Mode, TreeParams};
use num_traits::ToPrimitive;

fn spec(k: u32, ell: u32, mode: Mode) -> EnumerationSpec {
    EnumerationSpec::new(TreeParams::new(k, ell).unwrap(), mode)
}

#[test]
fn enumeration_is_distinct_reachable_and_complete() {
    for (k, ell) in [(2, 3), (3, 2)] {
        let p = TreeParams::new(k, ell).unwrap();
        let all = collect_stable(&spec(k, ell, Mode::Stream)).unwrap();
        assert_eq!(all.len() as u64, kappa(k, ell).unwrap().to_u64().unwrap());
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        for perm in &all {
            assert!(perm.has_block_extremes(k));
            assert_eq!(&FiringPlan::reconstruct(p, perm).unwrap().replay().unwrap(), perm);
        }
        assert!(all.iter().any(|s| s.permutation() == &digit_reversal(k, ell).unwrap()));
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    for (k, ell) in [(2, 3), (3, 2)] {
        let one = spec(k, ell, Mode::Stream);
        let four = one.clone().workers(4);
        assert_eq!(collect_stable(&one).unwrap(), collect_stable(&four).unwrap());
        assert_eq!(count_stable(&one).unwrap(), count_stable(&four).unwrap());
        assert_eq!(max_inversions_search(&one).unwrap(), max_inversions_search(&four).unwrap());
        assert_eq!(max_lds_search(&one).unwrap(), max_lds_search(&four).unwrap());
        assert_eq!(
            max_lds_search(&one.clone().prune(false)).unwrap(),
            max_lds_search(&four.clone().prune(false)).unwrap()
        );
    }
}

#[test]
fn subtree_bound_holds() {
    // D_k(ell) <= D_k(n) * k^(ell - n)
    let mut d = std::collections::HashMap::new();
    for (k, ell) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2)] {
        d.insert((k, ell), max_lds_search(&spec(k, ell, Mode::MaxLds)).unwrap().value);
    }
    for (&(k, ell), &v) in &d {
        for n in 1..=ell {
            assert!(v <= d[&(k, n)] * (k as u64).pow(ell - n), "k={k} ell={ell} n={n}");
        }
        if ell == 2 {
            assert_eq!(v, k as u64);
        }
    }
}

#[test]
fn extremal_witnesses_recompute() {
    let r = max_lds_search(&spec(4, 2, Mode::MaxLds)).unwrap();
    assert_eq!(lds(r.witness.permutation()) as u64, r.value);
    assert_eq!(r.closed_form, z_lds_closed_form(4, 2).unwrap());
    assert!(r.pruned > 0 || r.explored > 0);
}

#[test]
fn fuzz_examples() {
    for (k, ell, trials) in [(2, 2, 1000), (2, 3, 1000), (2, 0, 10), (3, 2, 500)] {
        let r = reachability_fuzz(&spec(k, ell, Mode::Stream), trials, 99).unwrap();
        assert!(r.escapes.is_empty(), "escape at k={k} ell={ell}: {:?}", r.escapes.first());
        assert!(r.distinct <= r.enumerated);
    }
}

/// Reference sequences with their offsets pinned: entry `i` is the value at
/// `ell = i + 1`. The k = 2 row is OEIS A052955 read from offset 0.
#[test]
fn sequence_fixtures() {
    let k2 = [1u64, 2, 3, 5, 7, 11, 15, 23, 31, 47];
    let k3 = [1u64, 3, 5, 11, 17, 35, 53, 107, 161, 323];
    for (i, (&a, &b)) in k2.iter().zip(&k3).enumerate() {
        let ell = i as u32 + 1;
        assert_eq!(z_lds_closed_form(2, ell).unwrap(), a);
        assert_eq!(z_lds_closed_form(3, ell).unwrap(), b);
        if ell <= 8 {
            assert_eq!(lds(&digit_reversal(2, ell).unwrap()) as u64, a);
        }
        if ell <= 6 {
            assert_eq!(lds(&digit_reversal(3, ell).unwrap()) as u64, b);
        }
    }
    // bit-reversal rows, 1-based
    let rows = ["1", "1 2", "1 3 2 4", "1 5 3 7 2 6 4 8"];
    for (ell, row) in rows.iter().enumerate() {
        assert_eq!(digit_reversal(2, ell as u32).unwrap().to_string(), *row);
    }
}
