//! Randomized reachability checks against the enumerated set.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enumerate_stable, EnumerationSpec};
use crate::error::Result;
use crate::strategy::{FiringPlan, Strategy};
use crate::tree::{ChipLabel, Configuration, FiringEvent, StablePermutation, Stabilization, TreeParams, VertexId};

/// Fires a uniformly random `k`-subset at a uniformly random fireable vertex
/// until the configuration is stable.
pub fn stabilize_interleaved(params: TreeParams, seed: u64) -> Result<Stabilization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = params.k() as usize;
    let internal = params.layer_start(params.num_layers()) - 1;
    let mut cfg = Configuration::initial(params);
    let mut events = Vec::new();
    loop {
        let fireable: Vec<VertexId> = (1..=internal)
            .map(VertexId::new)
            .filter(|&v| cfg.chips_at(v).is_ok_and(|c| c.len() >= k))
            .collect();
        if fireable.is_empty() {
            break;
        }
        let v = fireable[rng.gen_range(0..fireable.len())];
        let here = cfg.chips_at(v)?;
        let mut picks = sample(&mut rng, here.len(), k).into_vec();
        picks.sort_unstable();
        let tuple: Vec<ChipLabel> = picks.into_iter().map(|i| here[i]).collect();
        let event = FiringEvent::new(v, tuple);
        cfg.apply(&event)?;
        events.push(event);
    }
    let permutation = cfg.stable_permutation().expect("loop exits only when stable");
    Ok(Stabilization {
        permutation,
        plan: FiringPlan::new(params, format!("interleaved:{seed}"), events),
    })
}

/// A fuzz result outside the enumerated set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzEscape {
    pub trial: u64,
    pub seed: u64,
    pub permutation: StablePermutation,
    pub plan: FiringPlan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub trials: u64,
    pub enumerated: usize,
    /// Distinct permutations produced by the trials.
    pub distinct: usize,
    pub escapes: Vec<FuzzEscape>,
}

/// Runs `trials` random stabilizations and checks each result against the
/// full enumeration. Even trials use a layer-synchronous random strategy,
/// odd trials a random interleaving of fireable vertices.
pub fn reachability_fuzz(spec: &EnumerationSpec, trials: u64, seed: u64) -> Result<FuzzReport> {
    let params = spec.params;
    let mut known: HashSet<Vec<ChipLabel>> = HashSet::new();
    enumerate_stable(&EnumerationSpec { limit: None, ..spec.clone() }, |p| {
        known.insert(p.to_vec());
        ControlFlow::Continue(())
    })?;

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut escapes = Vec::new();
    for trial in 0..trials {
        let trial_seed = master.next_u64();
        let run = if trial % 2 == 0 {
            Strategy::random(trial_seed).run(params)?
        } else {
            stabilize_interleaved(params, trial_seed)?
        };
        let seq = run.permutation.as_slice().to_vec();
        if !known.contains(&seq) {
            escapes.push(FuzzEscape {
                trial,
                seed: trial_seed,
                permutation: run.permutation,
                plan: run.plan,
            });
        }
        seen.insert(seq);
    }
    Ok(FuzzReport {
        trials,
        enumerated: known.len(),
        distinct: seen.len(),
        escapes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Mode;

    fn spec(k: u32, ell: u32) -> EnumerationSpec {
        EnumerationSpec::new(TreeParams::new(k, ell).unwrap(), Mode::Stream)
    }

    #[test]
    fn interleaved_runs_are_stable_and_replayable() {
        let p = TreeParams::new(3, 2).unwrap();
        for seed in 0..20 {
            let run = stabilize_interleaved(p, seed).unwrap();
            assert!(run.permutation.has_block_extremes(3));
            assert_eq!(run.plan.replay().unwrap(), run.permutation);
            assert_eq!(run.plan.events.len(), 2 * 3);
        }
    }

    #[test]
    fn small_fuzz_has_no_escapes() {
        let r = reachability_fuzz(&spec(2, 2), 1000, 7).unwrap();
        assert!(r.escapes.is_empty());
        assert_eq!(r.enumerated, 2);
        assert_eq!(r.distinct, 2);
        let r = reachability_fuzz(&spec(2, 0), 5, 1).unwrap();
        assert!(r.escapes.is_empty());
        assert_eq!(r.distinct, 1);
    }
}
