//! Tuple-selection strategies.
//!
//! A strategy answers one question: given a vertex that is about to empty
//! itself and the number of chips it holds, in what order and in which
//! k-subsets should those chips fire? Answers are expressed as rank tuples
//! (0-based indices into the vertex's sorted chips), so a strategy depends
//! only on the relative order of the labels it sees. That makes every
//! strategy reusable on any set of distinct labels, which is what the
//! bundle and unbundle constructions rely on.

use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{pattern_of, Permutation};
use crate::error::{Error, Result};
use crate::tree::{self, ChipLabel, Configuration, FiringEvent, StablePermutation, TreeParams, VertexId};

/// Name of the generator behind [`Strategy::Random`]. Bump the suffix if the
/// derivation of per-vertex streams ever changes.
pub const RANDOM_GENERATOR: &str = "chacha8-v1";

/// Rank tuples for one vertex, in firing order.
pub type RankPlan = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Bundling at every vertex: child c receives the c-th consecutive block
    /// of ranks. Produces the identity permutation.
    Identity,
    /// Unbundling at every vertex: fires ranks `0..k`, then `k..2k`, and so
    /// on, so child c receives every k-th chip. Produces the digit-reversal
    /// permutation.
    Unbundle,
    /// Seeded uniform k-subset selection.
    Random { seed: u64 },
    /// `top` bundled over layers `1..=levels`, then `children[i]` inside the
    /// subtree under the i-th vertex of layer `levels + 1`. The result is the
    /// inflation of top's permutation by the children's permutations.
    Compose {
        levels: u32,
        top: Box<Strategy>,
        children: Vec<Strategy>,
    },
    /// Identity unbundled over layers `1..=levels`, unbundling below. On
    /// `k^(2 levels)` chips every pattern of length `k^levels` appears.
    Embed { levels: u32 },
}

impl Strategy {
    pub fn identity() -> Self {
        Strategy::Identity
    }

    pub fn unbundle() -> Self {
        Strategy::Unbundle
    }

    pub fn random(seed: u64) -> Self {
        Strategy::Random { seed }
    }

    pub fn compose(levels: u32, top: Strategy, children: Vec<Strategy>) -> Self {
        Strategy::Compose {
            levels,
            top: Box::new(top),
            children,
        }
    }

    /// Canonical name; [`Strategy::from_name`] accepts every name produced
    /// here except composites.
    pub fn name(&self) -> String {
        match self {
            Strategy::Identity => "identity".into(),
            Strategy::Unbundle => "unbundle".into(),
            Strategy::Random { seed } => format!("random:{seed}"),
            Strategy::Embed { levels } => format!("embed:{levels}"),
            Strategy::Compose {
                levels,
                top,
                children,
            } => {
                let kids: Vec<_> = children.iter().map(Strategy::name).collect();
                format!("compose({levels},{},[{}])", top.name(), kids.join(","))
            }
        }
    }

    /// Parses `identity`, `unbundle`, `random:<seed>` and `embed:<n>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let unknown = || Error::UnknownStrategy(name.to_string());
        match name {
            "identity" => return Ok(Strategy::Identity),
            "unbundle" => return Ok(Strategy::Unbundle),
            _ => {}
        }
        if let Some(seed) = name.strip_prefix("random:") {
            return seed.parse().map(Strategy::random).map_err(|_| unknown());
        }
        if let Some(n) = name.strip_prefix("embed:") {
            return n
                .parse()
                .map(|levels| Strategy::Embed { levels })
                .map_err(|_| unknown());
        }
        Err(unknown())
    }

    /// Parses a compose spec: an indentation tree of strategy names.
    ///
    /// ```text
    /// # comments and blank lines are ignored
    /// compose 1
    ///   unbundle        first child of a compose node: the top strategy
    ///   identity        remaining children: one per subtree, left to right
    ///   random:7
    /// ```
    pub fn parse_compose_spec(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let indent = body.len() - body.trim_start().len();
            lines.push((no + 1, indent, body.trim().to_string()));
        }
        if lines.is_empty() {
            return Err(Error::ComposeSpec {
                line: 0,
                reason: "empty spec".into(),
            });
        }
        let mut pos = 0;
        let root = parse_node(&lines, &mut pos)?;
        if let Some((line, _, _)) = lines.get(pos) {
            return Err(Error::ComposeSpec {
                line: *line,
                reason: "more than one root strategy".into(),
            });
        }
        Ok(root)
    }

    /// Checks structural requirements against concrete tree parameters.
    pub fn validate(&self, params: TreeParams) -> Result<()> {
        match self {
            Strategy::Identity | Strategy::Unbundle | Strategy::Random { .. } => Ok(()),
            Strategy::Embed { levels } => {
                if params.ell() != 2 * levels {
                    return Err(Error::EmbeddingDepth {
                        expected: 2 * levels,
                        got: params.ell(),
                    });
                }
                Ok(())
            }
            Strategy::Compose {
                levels,
                top,
                children,
            } => {
                if *levels > params.ell() {
                    return Err(Error::ComposeTooDeep {
                        levels: *levels,
                        ell: params.ell(),
                    });
                }
                let expected = params.pow(*levels);
                if children.len() != expected {
                    return Err(Error::LengthMismatch {
                        expected,
                        got: children.len(),
                    });
                }
                top.validate(TreeParams::new(params.k(), *levels)?)?;
                let below = TreeParams::new(params.k(), params.ell() - levels)?;
                children.iter().try_for_each(|c| c.validate(below))
            }
        }
    }

    /// Firing order for `vertex`, which holds `len` chips and is about to be
    /// emptied. `len` is always `k^(ell - t + 1)` for a layer-t vertex under
    /// layer-synchronous stabilization.
    pub fn tuples(&self, params: TreeParams, vertex: VertexId, len: usize) -> Result<RankPlan> {
        let k = params.k() as usize;
        if !len.is_multiple_of(k) {
            return Err(Error::InvalidPlan {
                name: self.name(),
                vertex: vertex.index(),
                reason: format!("{len} chips is not a multiple of k"),
            });
        }
        Ok(match self {
            Strategy::Identity => bundle_ranks(k, len),
            Strategy::Unbundle => unbundle_ranks(k, len),
            Strategy::Random { seed } => random_ranks(*seed, vertex, k, len),
            Strategy::Compose {
                levels,
                top,
                children,
            } => {
                let t = params.layer_of(vertex)?;
                if t <= *levels {
                    let top_params = TreeParams::new(params.k(), *levels)?;
                    let copies = len / top_params.pow(levels - t + 1);
                    let inner = top.tuples(top_params, vertex, len / copies)?;
                    lift_bundled(&inner, copies)
                } else {
                    let sub = TreeParams::new(params.k(), params.ell() - levels)?;
                    let (which, local) = subtree_address(params, *levels, vertex)?;
                    children[which].tuples(sub, local, len)?
                }
            }
            Strategy::Embed { levels } => {
                let t = params.layer_of(vertex)?;
                if t <= *levels {
                    let group = params.pow(levels - t + 1);
                    let inner = bundle_ranks(k, group);
                    lift_unbundled(&inner, group, len / group)
                } else {
                    unbundle_ranks(k, len)
                }
            }
        })
    }

    /// Runs the strategy from the initial configuration.
    pub fn run(&self, params: TreeParams) -> Result<tree::Stabilization> {
        tree::stabilize(&Configuration::initial(params), self)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn parse_node(lines: &[(usize, usize, String)], pos: &mut usize) -> Result<Strategy> {
    let (line, indent, text) = &lines[*pos];
    *pos += 1;
    let spec_err = |reason: String| Error::ComposeSpec {
        line: *line,
        reason,
    };
    let mut words = text.split_whitespace();
    if words.next() != Some("compose") {
        return Strategy::from_name(text).map_err(|e| spec_err(e.to_string()));
    }
    let levels: u32 = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| spec_err("`compose` needs a level count".into()))?;
    if words.next().is_some() {
        return Err(spec_err("unexpected tokens after level count".into()));
    }
    let mut parts = Vec::new();
    let mut child_indent = None;
    while let Some((_, next_indent, _)) = lines.get(*pos) {
        if next_indent <= indent {
            break;
        }
        match child_indent {
            None => child_indent = Some(*next_indent),
            Some(ci) if ci != *next_indent => {
                return Err(Error::ComposeSpec {
                    line: lines[*pos].0,
                    reason: "inconsistent indentation".into(),
                })
            }
            _ => {}
        }
        parts.push(parse_node(lines, pos)?);
    }
    if parts.len() < 2 {
        return Err(spec_err("compose needs a top strategy and at least one child".into()));
    }
    let top = parts.remove(0);
    Ok(Strategy::compose(levels, top, parts))
}

/// Child c receives ranks `c*m .. (c+1)*m`.
fn bundle_ranks(k: usize, len: usize) -> RankPlan {
    let m = len / k;
    (0..m).map(|j| (0..k).map(|i| j + i * m).collect()).collect()
}

/// Consecutive k-blocks of ranks.
fn unbundle_ranks(k: usize, len: usize) -> RankPlan {
    (0..len / k).map(|j| (j * k..(j + 1) * k).collect()).collect()
}

fn random_ranks(seed: u64, vertex: VertexId, k: usize, len: usize) -> RankPlan {
    let stream = seed ^ (vertex.index() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let mut remaining: Vec<usize> = (0..len).collect();
    let mut plan = Vec::with_capacity(len / k);
    while remaining.len() >= k {
        let mut picks = sample(&mut rng, remaining.len(), k).into_vec();
        picks.sort_unstable();
        plan.push(picks.iter().map(|&i| remaining[i]).collect());
        for &i in picks.iter().rev() {
            remaining.remove(i);
        }
    }
    plan
}

/// Runs `inner` on each of `copies` rank-stride classes. Class g holds
/// ranks `g, g + copies, g + 2 copies, ...`.
fn lift_bundled(inner: &RankPlan, copies: usize) -> RankPlan {
    let mut plan = Vec::with_capacity(inner.len() * copies);
    for tuple in inner {
        for g in 0..copies {
            plan.push(tuple.iter().map(|&r| r * copies + g).collect());
        }
    }
    plan
}

/// Runs `inner` on each consecutive group of `group` ranks.
fn lift_unbundled(inner: &RankPlan, group: usize, groups: usize) -> RankPlan {
    let mut plan = Vec::with_capacity(inner.len() * groups);
    for g in 0..groups {
        for tuple in inner {
            plan.push(tuple.iter().map(|&r| g * group + r).collect());
        }
    }
    plan
}

/// For a vertex below layer `levels + 1`, returns which layer-`(levels+1)`
/// subtree holds it and its label inside that subtree.
fn subtree_address(params: TreeParams, levels: u32, v: VertexId) -> Result<(usize, VertexId)> {
    let t = params.layer_of(v)?;
    let pos = v.index() - params.layer_start(t);
    let width = params.pow(t - levels - 1);
    let sub = TreeParams::new(params.k(), params.ell() - levels)?;
    let local = sub.layer_start(t - levels) + pos % width;
    Ok((pos / width, VertexId::new(local)))
}

/// Strategy realizing `pattern`, plus the witness chips
/// `i + (p_i - 1) k^n` whose standardization is `pattern`.
pub fn pattern_embedding_strategy(
    k: u32,
    pattern: &Permutation,
) -> Result<(Strategy, Vec<ChipLabel>)> {
    let len = pattern.len();
    let mut levels = 0u32;
    let mut size = 1usize;
    while size < len {
        size *= k as usize;
        levels += 1;
    }
    if size != len || k < 2 {
        return Err(Error::NotPowerOfK { len, k });
    }
    let witness = pattern
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1 + (p as usize - 1) * len) as ChipLabel)
        .collect();
    Ok((Strategy::Embed { levels }, witness))
}

/// Positions (0-based) of `chips` in `perm`, in order of appearance, if they
/// appear left to right in the given order.
pub fn witness_positions(perm: &StablePermutation, chips: &[ChipLabel]) -> Option<Vec<usize>> {
    let mut where_is = vec![usize::MAX; perm.as_slice().len() + 1];
    for (i, &c) in perm.as_slice().iter().enumerate() {
        where_is[c as usize] = i;
    }
    let positions: Vec<usize> = chips
        .iter()
        .map(|&c| where_is.get(c as usize).copied().unwrap_or(usize::MAX))
        .collect();
    let ordered = positions.iter().all(|&p| p != usize::MAX)
        && positions.windows(2).all(|w| w[0] < w[1]);
    ordered.then_some(positions)
}

/// Checks that `chips` appear in order in `perm` and standardize to `pattern`.
pub fn witness_realizes(perm: &StablePermutation, chips: &[ChipLabel], pattern: &Permutation) -> bool {
    witness_positions(perm, chips).is_some()
        && pattern_of(&chips.iter().map(|&c| c as u64).collect::<Vec<_>>())
            .map(|p| &p == pattern)
            .unwrap_or(false)
}

/// Ordered log of firings produced by one stabilization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringPlan {
    pub params: TreeParams,
    pub strategy: String,
    pub events: Vec<FiringEvent>,
}

impl FiringPlan {
    pub fn new(params: TreeParams, strategy: String, events: Vec<FiringEvent>) -> Self {
        FiringPlan {
            params,
            strategy,
            events,
        }
    }

    /// Replays the events from the initial configuration.
    pub fn replay(&self) -> Result<StablePermutation> {
        let mut cfg = Configuration::initial(self.params);
        for e in &self.events {
            cfg.apply(e)?;
        }
        cfg.stable_permutation().ok_or_else(|| Error::InvalidPlan {
            name: self.strategy.clone(),
            vertex: 1,
            reason: "replay did not reach a stable configuration".into(),
        })
    }

    /// Number of firings per vertex, indexed by `vertex - 1`.
    pub fn firing_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.params.num_vertices()];
        for e in &self.events {
            counts[e.vertex.index() - 1] += 1;
        }
        counts
    }

    /// Rebuilds a layer-synchronous plan that reaches `perm`.
    ///
    /// Each vertex's dispersion is read off the leaf blocks below it, and the
    /// j-th tuple fired there takes the j-th smallest chip bound for each
    /// child. Fails if `perm` is not reachable.
    pub fn reconstruct(params: TreeParams, perm: &StablePermutation) -> Result<Self> {
        let seq = perm.as_slice();
        if seq.len() != params.num_chips() {
            return Err(Error::LengthMismatch {
                expected: params.num_chips(),
                got: seq.len(),
            });
        }
        let k = params.k() as usize;
        let mut events = Vec::new();
        for t in 1..=params.ell() {
            let block = params.pow(params.ell() - t + 1);
            let part = block / k;
            for (pos, v) in params.layer(t).enumerate() {
                let leaves = &seq[pos * block..(pos + 1) * block];
                let mut parts: Vec<Vec<ChipLabel>> = leaves.chunks(part).map(|c| c.to_vec()).collect();
                for p in &mut parts {
                    p.sort_unstable();
                }
                for j in 0..part {
                    events.push(FiringEvent::new(v, parts.iter().map(|p| p[j]).collect()));
                }
            }
        }
        let plan = FiringPlan::new(params, "reconstructed".into(), events);
        let replayed = plan.replay()?;
        if &replayed != perm {
            return Err(Error::InvalidPlan {
                name: plan.strategy,
                vertex: 1,
                reason: "replay does not reproduce the permutation".into(),
            });
        }
        Ok(plan)
    }
}

impl fmt::Display for FiringPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}
