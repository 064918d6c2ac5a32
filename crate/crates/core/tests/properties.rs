use proptest::prelude::*;

use chipfire::combinatorics::{
    contains_pattern, digit_reversal, inflate, inversions, lds, pattern_of, tensor, to_digits,
};
use chipfire::search::stabilize_interleaved;
use chipfire::{FiringPlan, Permutation, Strategy as Policy, TreeParams};

fn shuffled(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle()
}

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (0..=max).prop_flat_map(shuffled).prop_map(|v| Permutation::new(v).unwrap())
}

fn shape() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![(2u32..=3, 0u32..=4), (4u32..=5, 0u32..=2)]
}

fn quadratic_inversions(s: &[u32]) -> u64 {
    let mut c = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            c += (s[i] > s[j]) as u64;
        }
    }
    c
}

fn quadratic_lds(s: &[u32]) -> usize {
    let mut best = vec![1usize; s.len()];
    for i in 0..s.len() {
        for j in 0..i {
            if s[j] > s[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn brute_contains(w: &[u32], sigma: &[u32], picked: &mut Vec<u32>, from: usize) -> bool {
    if picked.len() == sigma.len() {
        let n = sigma.len();
        return (0..n).all(|i| (0..n).all(|j| (picked[i] < picked[j]) == (sigma[i] < sigma[j])));
    }
    (from..w.len()).any(|i| {
        picked.push(w[i]);
        let hit = brute_contains(w, sigma, picked, i + 1);
        picked.pop();
        hit
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inversions_match_quadratic(p in permutation(300)) {
        prop_assert_eq!(inversions(&p), quadratic_inversions(p.as_slice()));
    }

    #[test]
    fn lds_matches_quadratic(p in permutation(120)) {
        prop_assert_eq!(lds(&p), quadratic_lds(p.as_slice()));
    }

    #[test]
    fn random_runs_satisfy_invariants((k, ell) in shape(), seed in any::<u64>()) {
        let p = TreeParams::new(k, ell).unwrap();
        let run = Policy::random(seed).run(p).unwrap();
        prop_assert!(run.permutation.has_block_extremes(k));
        prop_assert_eq!(run.plan.replay().unwrap(), run.permutation.clone());
        let rebuilt = FiringPlan::reconstruct(p, &run.permutation).unwrap();
        prop_assert_eq!(rebuilt.replay().unwrap(), run.permutation.clone());
        prop_assert!(inversions(run.permutation.permutation()) <= inversions(&digit_reversal(k, ell).unwrap()));
    }

    #[test]
    fn interleaved_runs_match_layered_firing_counts((k, ell) in shape(), seed in any::<u64>()) {
        let p = TreeParams::new(k, ell).unwrap();
        let run = stabilize_interleaved(p, seed).unwrap();
        prop_assert!(run.permutation.has_block_extremes(k));
        let counts = run.plan.firing_counts();
        for t in 1..=ell {
            for v in p.layer(t) {
                prop_assert_eq!(counts[v.index() - 1], (k as usize).pow(ell - t));
            }
        }
        // order-independent: a layer-synchronous plan reaches the same result
        prop_assert!(FiringPlan::reconstruct(p, &run.permutation).is_ok());
    }

    #[test]
    fn digit_reversal_reverses_digits(k in 2u32..=5, ell in 0u32..=5) {
        prop_assume!((k as u64).pow(ell) <= 4096);
        let z = digit_reversal(k, ell).unwrap();
        for (i, &v) in z.as_slice().iter().enumerate() {
            let mut d = to_digits(k, ell, i as u64);
            d.reverse();
            prop_assert_eq!(d, to_digits(k, ell, v as u64 - 1));
        }
    }

    #[test]
    fn inflation_is_tensor_for_equal_blocks(tau in permutation(5), gamma in permutation(5)) {
        prop_assume!(!tau.is_empty() && !gamma.is_empty());
        let blocks = vec![gamma.clone(); tau.len()];
        prop_assert_eq!(inflate(&tau, &blocks).unwrap(), tensor(&tau, &gamma));
    }

    #[test]
    fn found_patterns_standardize_correctly(w in permutation(12), sigma in permutation(4)) {
        prop_assume!(sigma.len() <= w.len());
        if let Some(pos) = contains_pattern(&w, &sigma).unwrap() {
            let values: Vec<u64> = pos.iter().map(|&i| w.as_slice()[i] as u64).collect();
            prop_assert!(pos.windows(2).all(|x| x[0] < x[1]));
            prop_assert_eq!(pattern_of(&values).unwrap(), sigma);
        } else {
            prop_assert!(!brute_contains(w.as_slice(), sigma.as_slice(), &mut Vec::new(), 0));
        }
    }
}
