//! Exhaustive enumeration of stable configurations and extremal searches.
//!
//! Enumeration recurses over ballot walks rather than firing sequences, so
//! each stable permutation appears exactly once. Work splits on the root's
//! walk; results are merged in walk order, so every output (including the
//! node counters) is the same for any worker count.

mod engine;
mod fuzz;

use std::ops::ControlFlow;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{digit_reversal, inversions, kappa, lds, max_inversions_closed_form, z_lds_closed_form};
use crate::error::{Error, Result};
use crate::strategy::FiringPlan;
use crate::tree::{ChipLabel, StablePermutation, TreeParams};
use crate::Permutation;

use engine::{Best, Collector, Counter, Counters, Dfs, InversionMax, LdsMax, Tables, Visitor, MAX_K};

pub use fuzz::{reachability_fuzz, stabilize_interleaved, FuzzEscape, FuzzReport};

/// Default cap on the number of configurations a search may visit.
pub const DEFAULT_MAX_CONFIGS: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_MAX_CONFIGS`].
pub const MAX_CONFIGS_ENV: &str = "CHIPFIRE_MAX_CONFIGS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Stream,
    Count,
    MaxInversions,
    MaxLds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub params: TreeParams,
    pub mode: Mode,
    pub workers: usize,
    pub limit: Option<u64>,
    /// Skip the size guard.
    pub force: bool,
    /// Branch-and-bound for `MaxLds`.
    pub prune: bool,
    pub max_configs: u64,
}

impl EnumerationSpec {
    pub fn new(params: TreeParams, mode: Mode) -> Self {
        EnumerationSpec {
            params,
            mode,
            workers: 1,
            limit: None,
            force: false,
            prune: true,
            max_configs: DEFAULT_MAX_CONFIGS,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn limit(mut self, limit: u64) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn prune(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn max_configs(mut self, cap: u64) -> Self {
        self.max_configs = cap;
        self
    }

    /// Reads the cap from `CHIPFIRE_MAX_CONFIGS` when set.
    pub fn max_configs_from_env(self) -> Result<Self> {
        match std::env::var(MAX_CONFIGS_ENV) {
            Ok(v) => {
                let cap = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{MAX_CONFIGS_ENV}=`{v}` is not an integer")))?;
                Ok(self.max_configs(cap))
            }
            Err(_) => Ok(self),
        }
    }

    fn check(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::NoWorkers);
        }
        let k = self.params.k() as usize;
        if k > MAX_K {
            return Err(Error::InvalidBranching(k as u32));
        }
        if !self.force {
            let estimate = kappa(self.params.k(), self.params.ell())?;
            if estimate > self.max_configs.into() {
                return Err(Error::SizeGuard {
                    estimate: estimate.to_string(),
                    cap: self.max_configs,
                });
            }
        }
        Ok(())
    }
}

/// Counters reported by [`enumerate_stable`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    pub emitted: u64,
    pub explored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Inversions,
    Lds,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Inversions => "inversions",
            Statistic::Lds => "lds",
        }
    }

    pub fn of(self, perm: &Permutation) -> u64 {
        match self {
            Statistic::Inversions => inversions(perm),
            Statistic::Lds => lds(perm) as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalReport {
    pub params: TreeParams,
    pub statistic: Statistic,
    pub value: u64,
    /// First optimum in enumeration order.
    pub witness: StablePermutation,
    pub closed_form: u64,
    /// Value of the statistic on the digit-reversal permutation.
    pub digit_reversal_value: u64,
    pub explored: u64,
    pub pruned: u64,
}

impl ExtremalReport {
    pub fn matches_closed_form(&self) -> bool {
        self.value == self.closed_form
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureReport {
    pub search: ExtremalReport,
    /// LDS of the digit-reversal permutation.
    pub z_value: u64,
    pub verdict: Verdict,
    /// Set on violation: a plan reaching the witness.
    pub witness_plan: Option<FiringPlan>,
}

/// Per-height, per-root-walk job layout shared by all searches.
struct Layout {
    tables: Tables,
    height: u32,
    n: usize,
}

impl Layout {
    fn new(params: TreeParams) -> Self {
        Layout {
            tables: Tables::new(params.k() as usize, params.ell()),
            height: params.ell(),
            n: params.num_chips(),
        }
    }

    fn roots(&self) -> usize {
        if self.height == 0 {
            1
        } else {
            self.tables.walk_count(self.height)
        }
    }

    fn root_walk(&self, i: usize) -> Option<usize> {
        (self.height > 0).then_some(i)
    }

    /// Runs `make()` once per root walk and returns results in walk order.
    fn map_roots<V, R, M, F>(&self, workers: usize, bounds: &[u64], make: M, finish: F) -> Result<Vec<R>>
    where
        V: Visitor,
        R: Send,
        M: Fn() -> V + Sync,
        F: Fn(Dfs<'_, V>) -> R + Sync,
    {
        let job = |i: usize| {
            let mut dfs = Dfs::new(&self.tables, bounds, self.n, make());
            let _ = dfs.run(self.height, self.root_walk(i));
            finish(dfs)
        };
        if workers == 1 {
            return Ok((0..self.roots()).map(job).collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?;
        Ok(pool.install(|| (0..self.roots()).into_par_iter().map(job).collect()))
    }
}

fn stable(seq: Vec<ChipLabel>) -> StablePermutation {
    StablePermutation::new(Permutation::new(seq).expect("engine emits permutations"))
        .expect("engine emits stable permutations")
}

/// Streams every stable permutation, in canonical order, into `sink`.
///
/// The sink may stop early by returning `ControlFlow::Break`. With several
/// workers, root walks are processed in ordered batches so output order is
/// unchanged.
pub fn enumerate_stable<F>(spec: &EnumerationSpec, mut sink: F) -> Result<EnumerationStats>
where
    F: FnMut(&[ChipLabel]) -> ControlFlow<()>,
{
    spec.check()?;
    let layout = Layout::new(spec.params);
    let n = layout.n;
    let zero = vec![0u64; layout.height as usize + 1];
    let mut stats = EnumerationStats::default();
    let mut remaining = spec.limit.unwrap_or(u64::MAX);
    let batch = spec.workers.max(1) * 4;
    let pool = if spec.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(spec.workers)
                .build()
                .map_err(|e| Error::WorkerPool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut first = 0;
    while first < layout.roots() && remaining > 0 {
        let last = (first + batch).min(layout.roots());
        let job = |i: usize| {
            let collector = Collector {
                flat: Vec::new(),
                count: 0,
                limit: remaining,
            };
            let mut dfs = Dfs::new(&layout.tables, &zero, n, collector);
            let _ = dfs.run(layout.height, layout.root_walk(i));
            (dfs.visitor.flat, dfs.counters)
        };
        let chunks: Vec<(Vec<ChipLabel>, Counters)> = match &pool {
            Some(pool) => pool.install(|| (first..last).into_par_iter().map(job).collect()),
            None => (first..last).map(job).collect(),
        };
        for (flat, counters) in chunks {
            stats.explored += counters.explored;
            for perm in flat.chunks(n.max(1)) {
                if remaining == 0 {
                    return Ok(stats);
                }
                remaining -= 1;
                stats.emitted += 1;
                if sink(perm).is_break() {
                    return Ok(stats);
                }
            }
        }
        first = last;
    }
    Ok(stats)
}

/// Materializes the enumeration, honoring `spec.limit`.
pub fn collect_stable(spec: &EnumerationSpec) -> Result<Vec<StablePermutation>> {
    let mut out = Vec::new();
    enumerate_stable(spec, |p| {
        out.push(stable(p.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Number of stable permutations, counted without materializing them.
pub fn count_stable(spec: &EnumerationSpec) -> Result<u64> {
    spec.check()?;
    let layout = Layout::new(spec.params);
    let zero = vec![0u64; layout.height as usize + 1];
    let counts = layout.map_roots(spec.workers, &zero, Counter::default, |d| d.visitor.count)?;
    Ok(counts.into_iter().sum())
}

fn report(
    spec: &EnumerationSpec,
    statistic: Statistic,
    best: Option<Best>,
    counters: Counters,
    closed_form: u64,
) -> Result<ExtremalReport> {
    let best = best.expect("every tree has at least one stable configuration");
    let z = digit_reversal(spec.params.k(), spec.params.ell())?;
    Ok(ExtremalReport {
        params: spec.params,
        statistic,
        value: best.value,
        witness: stable(best.witness),
        closed_form,
        digit_reversal_value: statistic.of(&z),
        explored: counters.explored,
        pruned: counters.pruned,
    })
}

fn merge(parts: Vec<(Option<Best>, Counters)>) -> (Option<Best>, Counters) {
    parts.into_iter().fold((None, Counters::default()), |(b, c), (pb, pc)| {
        (
            Best::merge(b, pb),
            Counters {
                explored: c.explored + pc.explored,
                pruned: c.pruned + pc.pruned,
            },
        )
    })
}

/// Maximum inversion count over all stable permutations.
pub fn max_inversions_search(spec: &EnumerationSpec) -> Result<ExtremalReport> {
    spec.check()?;
    let p = spec.params;
    let layout = Layout::new(p);
    let zero = vec![0u64; layout.height as usize + 1];
    let parts = layout.map_roots(
        spec.workers,
        &zero,
        || InversionMax::new(layout.n),
        |d| (d.visitor.best, d.counters),
    )?;
    let (best, counters) = merge(parts);
    let closed = max_inversions_closed_form(p.k(), p.ell())
        .to_u64()
        .ok_or(Error::Overflow("closed-form inversion count"))?;
    report(spec, Statistic::Inversions, best, counters, closed)
}

/// `D_k(h)` for `h < ell`, used as per-subtree bounds.
fn subtree_lds_bounds(spec: &EnumerationSpec) -> Result<Vec<u64>> {
    let k = spec.params.k();
    let mut bounds = vec![1u64; spec.params.ell() as usize + 1];
    for h in 2..spec.params.ell() {
        let sub = EnumerationSpec {
            params: TreeParams::new(k, h)?,
            force: true,
            ..spec.clone()
        };
        bounds[h as usize] = lds_search_with(&sub, &bounds[..=h as usize])?.0.value;
    }
    // The top entry is never consulted below the root; keep it trivially valid.
    let ell = spec.params.ell() as usize;
    bounds[ell] = spec.params.num_chips() as u64;
    Ok(bounds)
}

fn lds_search_with(spec: &EnumerationSpec, bounds: &[u64]) -> Result<(ExtremalReport, Vec<u64>)> {
    let p = spec.params;
    let layout = Layout::new(p);
    let z = digit_reversal(p.k(), p.ell())?;
    let incumbent = lds(&z) as u64;
    let mut bounds = bounds.to_vec();
    bounds.resize(layout.height as usize + 1, p.num_chips() as u64);
    let parts = layout.map_roots(
        spec.workers,
        &bounds,
        || LdsMax::new(incumbent, spec.prune),
        |d| (d.visitor.best, d.counters),
    )?;
    let (best, counters) = merge(parts);
    let closed = if p.ell() == 0 {
        incumbent
    } else {
        z_lds_closed_form(p.k(), p.ell())?
    };
    Ok((report(spec, Statistic::Lds, best, counters, closed)?, bounds))
}

/// `D_k(ell)`: the longest decreasing subsequence over all stable
/// permutations. The closed-form field holds the LDS of digit reversal.
pub fn max_lds_search(spec: &EnumerationSpec) -> Result<ExtremalReport> {
    spec.check()?;
    let bounds = if spec.prune {
        subtree_lds_bounds(spec)?
    } else {
        vec![1; spec.params.ell() as usize + 1]
    };
    Ok(lds_search_with(spec, &bounds)?.0)
}

/// Compares `D_k(ell)` with the LDS of digit reversal.
pub fn verify_conjecture(spec: &EnumerationSpec) -> Result<ConjectureReport> {
    let search = max_lds_search(spec)?;
    let z_value = search.closed_form;
    let (verdict, witness_plan) = if search.value <= z_value {
        (Verdict::Consistent, None)
    } else {
        let plan = FiringPlan::reconstruct(spec.params, &search.witness)?;
        (Verdict::Violated, Some(plan))
    };
    Ok(ConjectureReport {
        search,
        z_value,
        verdict,
        witness_plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn spec(k: u32, ell: u32, mode: Mode) -> EnumerationSpec {
        EnumerationSpec::new(TreeParams::new(k, ell).unwrap(), mode)
    }

    fn listed(k: u32, ell: u32) -> Vec<String> {
        collect_stable(&spec(k, ell, Mode::Stream))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(listed(2, 0), vec!["1"]);
        assert_eq!(listed(2, 1), vec!["1 2"]);
        assert_eq!(listed(2, 2), vec!["1 2 3 4", "1 3 2 4"]);
        let all = listed(2, 3);
        assert_eq!(all.len(), 56);
        assert!(all.contains(&"1 5 3 7 2 6 4 8".to_string()));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 56);
    }

    #[test]
    fn counts_match_kappa() {
        for (k, ell) in [(2, 0), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2)] {
            let expect = kappa(k, ell).unwrap().to_u64().unwrap();
            assert_eq!(count_stable(&spec(k, ell, Mode::Count)).unwrap(), expect);
            assert_eq!(listed(k, ell).len() as u64, expect);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let one = spec(3, 2, Mode::Stream);
        let four = one.clone().workers(4);
        assert_eq!(collect_stable(&one).unwrap(), collect_stable(&four).unwrap());
        let s = spec(2, 3, Mode::MaxLds);
        assert_eq!(max_lds_search(&s).unwrap(), max_lds_search(&s.clone().workers(4)).unwrap());
        assert_eq!(
            max_inversions_search(&s).unwrap(),
            max_inversions_search(&s.clone().workers(3)).unwrap()
        );
    }

    #[test]
    fn limit_truncates_in_order() {
        let full = collect_stable(&spec(2, 3, Mode::Stream)).unwrap();
        for workers in [1, 2] {
            let part = collect_stable(&spec(2, 3, Mode::Stream).limit(5).workers(workers)).unwrap();
            assert_eq!(part, full[..5]);
        }
    }

    #[test]
    fn inversion_maxima() {
        for (k, ell, value) in [(2, 2, 1), (2, 3, 8), (3, 2, 9)] {
            let r = max_inversions_search(&spec(k, ell, Mode::MaxInversions)).unwrap();
            assert_eq!(r.value, value);
            assert!(r.matches_closed_form());
            assert_eq!(r.digit_reversal_value, value);
            assert_eq!(inversions(r.witness.permutation()), value);
        }
        let r = max_inversions_search(&spec(2, 3, Mode::MaxInversions)).unwrap();
        assert_eq!(r.witness.to_string(), "1 5 3 7 2 6 4 8");
        let r = max_inversions_search(&spec(3, 2, Mode::MaxInversions)).unwrap();
        assert_eq!(r.witness.to_string(), "1 4 7 2 5 8 3 6 9");
    }

    #[test]
    fn lds_maxima_pruned_and_unpruned() {
        for (k, ell, d) in [(2, 1, 1), (2, 2, 2), (2, 3, 3), (3, 2, 3)] {
            let s = spec(k, ell, Mode::MaxLds);
            let pruned = max_lds_search(&s).unwrap();
            let full = max_lds_search(&s.clone().prune(false)).unwrap();
            assert_eq!(pruned.value, d);
            assert_eq!(full.value, d);
            assert_eq!(pruned.witness, full.witness);
            assert_eq!(full.pruned, 0);
            assert_eq!(lds(pruned.witness.permutation()) as u64, d);
        }
    }

    #[test]
    fn conjecture_small() {
        for (k, ell) in [(2, 0), (2, 2), (2, 3), (3, 2)] {
            let r = verify_conjecture(&spec(k, ell, Mode::MaxLds)).unwrap();
            assert_eq!(r.verdict, Verdict::Consistent);
            assert!(r.witness_plan.is_none());
        }
    }

    #[test]
    fn size_guard() {
        let s = spec(2, 5, Mode::Count);
        assert!(matches!(count_stable(&s), Err(Error::SizeGuard { .. })));
        assert!(matches!(
            count_stable(&spec(2, 3, Mode::Count).max_configs(10)),
            Err(Error::SizeGuard { .. })
        ));
        assert_eq!(count_stable(&spec(2, 3, Mode::Count).max_configs(10).force(true)).unwrap(), 56);
        assert_eq!(count_stable(&spec(2, 2, Mode::Count).workers(0)), Err(Error::NoWorkers));
    }
}
