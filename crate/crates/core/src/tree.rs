//! Tree addressing, configurations and the firing rule.
//!
//! Vertices use the global 1-based numbering of the directed k-ary tree: the
//! root is `v1` and the j-th leftmost child of `v_i` is `v_{k(i-1)+j+1}`.
//! Only layers `1..=ell+1` are materialized, since no chip ever passes
//! layer `ell + 1` when the root starts with `k^ell` chips.

use std::fmt;

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::strategy::{FiringPlan, Strategy};

/// Chip labels are 1-based.
pub type ChipLabel = u32;

/// Upper bound on materialized vertices.
const MAX_VERTICES: u64 = 1 << 28;

/// Branching factor and depth exponent of a truncated tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    k: u32,
    ell: u32,
}

impl TreeParams {
    pub fn new(k: u32, ell: u32) -> Result<Self> {
        match k {
            0 => return Err(Error::InvalidBranching(0)),
            1 => return Err(Error::UnitBranching),
            _ => {}
        }
        let too_large = || Error::TooLarge { k, ell };
        let top = (k as u64).checked_pow(ell + 1).ok_or_else(too_large)?;
        let vertices = (top - 1) / (k as u64 - 1);
        if vertices > MAX_VERTICES {
            return Err(too_large());
        }
        Ok(TreeParams { k, ell })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// `k^ell`, the number of chips and of layer-`(ell+1)` vertices.
    pub fn num_chips(&self) -> usize {
        self.pow(self.ell)
    }

    pub fn num_layers(&self) -> u32 {
        self.ell + 1
    }

    pub fn num_vertices(&self) -> usize {
        self.layer_start(self.ell + 2) - 1
    }

    /// `k^e` as a usize. Callers stay within `0..=ell+1`.
    pub(crate) fn pow(&self, e: u32) -> usize {
        (self.k as usize).pow(e)
    }

    /// Index of the leftmost vertex on layer `t` (t >= 1).
    pub fn layer_start(&self, t: u32) -> usize {
        (self.pow(t - 1) - 1) / (self.k as usize - 1) + 1
    }

    pub fn vertex(&self, index: usize) -> Result<VertexId> {
        if index == 0 || index > self.num_vertices() {
            return Err(Error::VertexOutOfRange {
                index,
                max: self.num_vertices(),
            });
        }
        Ok(VertexId(index))
    }

    pub fn layer_of(&self, v: VertexId) -> Result<u32> {
        let v = self.vertex(v.0)?;
        Ok(self.layer_unchecked(v.0))
    }

    pub(crate) fn layer_unchecked(&self, index: usize) -> u32 {
        let mut t = 1;
        while self.layer_start(t + 1) <= index {
            t += 1;
        }
        t
    }

    /// 0-based offset of `v` within its layer.
    pub fn position_in_layer(&self, v: VertexId) -> Result<usize> {
        let t = self.layer_of(v)?;
        Ok(v.0 - self.layer_start(t))
    }

    pub fn child(&self, v: VertexId, j: u32) -> Result<VertexId> {
        let t = self.layer_of(v)?;
        if j == 0 || j > self.k {
            return Err(Error::ChildOutOfRange { j, k: self.k });
        }
        if t == self.num_layers() {
            return Err(Error::TruncationLayer(v.0));
        }
        Ok(VertexId(self.k as usize * (v.0 - 1) + j as usize + 1))
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>> {
        self.vertex(v.0)?;
        if v.0 == 1 {
            return Ok(None);
        }
        Ok(Some(VertexId((v.0 - 2) / self.k as usize + 1)))
    }

    /// Vertices on layer `t`, left to right.
    pub fn layer(&self, t: u32) -> impl Iterator<Item = VertexId> {
        (self.layer_start(t)..self.layer_start(t + 1)).map(VertexId)
    }
}

impl fmt::Display for TreeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}, ell={}", self.k, self.ell)
    }
}

/// 1-based global vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(usize);

impl VertexId {
    pub const ROOT: VertexId = VertexId(1);

    /// Unvalidated; range checks happen against a [`TreeParams`].
    pub fn new(index: usize) -> Self {
        VertexId(index)
    }

    pub fn index(&self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// One firing: `tuple` leaves `vertex`, its i-th chip going to child i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiringEvent {
    pub vertex: VertexId,
    pub tuple: Vec<ChipLabel>,
}

impl FiringEvent {
    pub fn new(vertex: VertexId, tuple: Vec<ChipLabel>) -> Self {
        FiringEvent { vertex, tuple }
    }
}

impl fmt::Display for FiringEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (", self.vertex)?;
        for (i, c) in self.tuple.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Placement of the labeled chips `1..=k^ell` on the truncated tree.
///
/// Each vertex keeps its chips sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    params: TreeParams,
    chips: Vec<Vec<ChipLabel>>,
}

impl Configuration {
    /// All chips on the root.
    pub fn initial(params: TreeParams) -> Self {
        let mut chips = vec![Vec::new(); params.num_vertices()];
        chips[0] = (1..=params.num_chips() as ChipLabel).collect();
        Configuration { params, chips }
    }

    /// Builds a configuration from `(vertex index, chips)` pairs; unlisted
    /// vertices are empty.
    pub fn from_assignment<I, C>(params: TreeParams, assignment: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, C)>,
        C: IntoIterator<Item = ChipLabel>,
    {
        let n = params.num_chips() as ChipLabel;
        let mut seen = vec![false; n as usize + 1];
        let mut chips = vec![Vec::new(); params.num_vertices()];
        for (index, set) in assignment {
            let v = params.vertex(index)?;
            for c in set {
                if c == 0 || c > n {
                    return Err(Error::ChipOutOfRange { chip: c, max: n });
                }
                if std::mem::replace(&mut seen[c as usize], true) {
                    return Err(Error::DuplicateChip(c));
                }
                chips[v.0 - 1].push(c);
            }
        }
        if let Some(missing) = (1..=n).find(|&c| !seen[c as usize]) {
            return Err(Error::MissingChip(missing));
        }
        for set in &mut chips {
            set.sort_unstable();
        }
        Ok(Configuration { params, chips })
    }

    pub fn params(&self) -> TreeParams {
        self.params
    }

    pub fn chips_at(&self, v: VertexId) -> Result<&[ChipLabel]> {
        self.params.vertex(v.0)?;
        Ok(&self.chips[v.0 - 1])
    }

    pub fn is_initial(&self) -> bool {
        self.chips[0].len() == self.params.num_chips()
    }

    /// True when no vertex above the truncation layer holds `k` or more chips.
    pub fn is_stable(&self) -> bool {
        let last = self.params.layer_start(self.params.num_layers()) - 1;
        let k = self.params.k as usize;
        self.chips[..last].iter().all(|set| set.len() < k)
    }

    /// Returns the configuration after firing `event`.
    pub fn fire(&self, event: &FiringEvent) -> Result<Configuration> {
        let mut next = self.clone();
        next.apply(event)?;
        Ok(next)
    }

    /// In-place variant of [`Configuration::fire`]. On error `self` is
    /// left untouched.
    pub fn apply(&mut self, event: &FiringEvent) -> Result<()> {
        let p = self.params;
        let v = p.vertex(event.vertex.0)?;
        if p.layer_unchecked(v.0) == p.num_layers() {
            return Err(Error::TruncationLayer(v.0));
        }
        let k = p.k as usize;
        if event.tuple.len() != k || event.tuple.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadTuple {
                expected: p.k,
                got: event.tuple.clone(),
            });
        }
        let here = &self.chips[v.0 - 1];
        let mut slots = Vec::with_capacity(k);
        for &c in &event.tuple {
            match here.binary_search(&c) {
                Ok(i) => slots.push(i),
                Err(_) => return Err(Error::ChipAbsent { chip: c, vertex: v.0 }),
            }
        }
        let here = &mut self.chips[v.0 - 1];
        for &i in slots.iter().rev() {
            here.remove(i);
        }
        let first_child = k * (v.0 - 1) + 2;
        for (j, &c) in event.tuple.iter().enumerate() {
            let set = &mut self.chips[first_child + j - 1];
            let at = set.partition_point(|&x| x < c);
            set.insert(at, c);
        }
        Ok(())
    }

    /// Reads layer `ell + 1` left to right, if the configuration is stable.
    pub fn stable_permutation(&self) -> Option<StablePermutation> {
        if !self.is_stable() {
            return None;
        }
        let start = self.params.layer_start(self.params.num_layers());
        let mut seq = Vec::with_capacity(self.params.num_chips());
        for set in &self.chips[start - 1..] {
            match set.as_slice() {
                [c] => seq.push(*c),
                _ => return None,
            }
        }
        StablePermutation::new(Permutation::new(seq).ok()?).ok()
    }

    /// Text dump: one `v<index>: c1 c2 ...` line per nonempty vertex.
    pub fn dump(&self) -> String {
        self.to_string()
    }

    /// Parses the output of [`Configuration::dump`].
    pub fn parse_dump(params: TreeParams, text: &str) -> Result<Self> {
        let mut assignment = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in `{line}`")))?;
            let index = head
                .trim()
                .strip_prefix('v')
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("bad vertex `{head}`")))?;
            let chips = rest
                .split_whitespace()
                .map(|s| s.parse::<ChipLabel>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            assignment.push((index, chips));
        }
        Configuration::from_assignment(params, assignment)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, set) in self.chips.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            write!(f, "v{}:", i + 1)?;
            for c in set {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The layer-`(ell+1)` chips of a stable configuration, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StablePermutation(Permutation);

impl StablePermutation {
    /// Checks the endpoint invariant: the smallest chip sits leftmost and the
    /// largest rightmost.
    pub fn new(perm: Permutation) -> Result<Self> {
        let s = perm.as_slice();
        let n = s.len() as u32;
        if n == 0 || s[0] != 1 || s[s.len() - 1] != n {
            return Err(Error::NotPermutation(s.len()));
        }
        Ok(StablePermutation(perm))
    }

    pub fn as_slice(&self) -> &[ChipLabel] {
        self.0.as_slice()
    }

    pub fn permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn into_permutation(self) -> Permutation {
        self.0
    }

    /// Every aligned block of `k^j` positions has its minimum first and its
    /// maximum last, for `j = 0..=ell`.
    pub fn has_block_extremes(&self, k: u32) -> bool {
        block_extremes_hold(self.as_slice(), k as usize)
    }
}

pub(crate) fn block_extremes_hold(seq: &[ChipLabel], k: usize) -> bool {
    let mut size = k;
    while size <= seq.len() {
        for block in seq.chunks(size) {
            let first = block[0];
            let last = block[block.len() - 1];
            if block.iter().any(|&x| x < first || x > last) {
                return false;
            }
        }
        size *= k;
    }
    true
}

impl fmt::Display for StablePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Result of a stabilization run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilization {
    pub permutation: StablePermutation,
    pub plan: FiringPlan,
}

/// Stabilizes an initial configuration under `strategy`.
///
/// Layer-synchronous: vertices fire in ascending index order, each one
/// emptying completely before the next is visited.
pub fn stabilize(config: &Configuration, strategy: &Strategy) -> Result<Stabilization> {
    stabilize_traced(config, strategy, |_, _| {})
}

/// [`stabilize`] with a callback after every firing.
pub fn stabilize_traced<F>(
    config: &Configuration,
    strategy: &Strategy,
    mut observer: F,
) -> Result<Stabilization>
where
    F: FnMut(&FiringEvent, &Configuration),
{
    if !config.is_initial() {
        return Err(Error::NotInitial);
    }
    let params = config.params;
    strategy.validate(params)?;
    let invalid = |vertex: usize, reason: String| Error::InvalidPlan {
        name: strategy.name(),
        vertex,
        reason,
    };

    let mut cfg = config.clone();
    let mut events = Vec::with_capacity(params.ell as usize * params.num_chips());
    let internal = params.layer_start(params.num_layers()) - 1;
    for index in 1..=internal {
        let v = VertexId(index);
        let snapshot = cfg.chips[index - 1].clone();
        if snapshot.is_empty() {
            continue;
        }
        for ranks in strategy.tuples(params, v, snapshot.len())? {
            let mut tuple = Vec::with_capacity(ranks.len());
            for r in ranks {
                let chip = *snapshot
                    .get(r)
                    .ok_or_else(|| invalid(index, format!("rank {r} out of range")))?;
                tuple.push(chip);
            }
            let event = FiringEvent::new(v, tuple);
            cfg.apply(&event).map_err(|e| invalid(index, e.to_string()))?;
            observer(&event, &cfg);
            events.push(event);
        }
        if !cfg.chips[index - 1].is_empty() {
            return Err(invalid(index, "chips left unfired".into()));
        }
    }
    let permutation = cfg
        .stable_permutation()
        .ok_or_else(|| invalid(1, "did not reach a stable configuration".into()))?;
    Ok(Stabilization {
        permutation,
        plan: FiringPlan::new(params, strategy.name(), events),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: u32, ell: u32) -> TreeParams {
        TreeParams::new(k, ell).unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(TreeParams::new(1, 3), Err(Error::UnitBranching));
        assert_eq!(TreeParams::new(0, 3), Err(Error::InvalidBranching(0)));
        assert!(matches!(TreeParams::new(2, 60), Err(Error::TooLarge { .. })));
        let q = p(2, 0);
        assert_eq!((q.num_chips(), q.num_layers(), q.num_vertices()), (1, 1, 1));
        let q = p(3, 2);
        assert_eq!((q.num_chips(), q.num_vertices()), (9, 13));
    }

    #[test]
    fn layers() {
        assert_eq!(p(2, 3).layer_of(VertexId(1)).unwrap(), 1);
        assert_eq!(p(5, 1).layer_of(VertexId(2)).unwrap(), 2);
        assert_eq!(p(5, 1).layer_of(VertexId(6)).unwrap(), 2);
        assert_eq!(p(2, 2).layer_of(VertexId(7)).unwrap(), 3);
        assert_eq!(p(2, 2).layer_of(VertexId(4)).unwrap(), 3);
        assert_eq!(p(2, 2).layer_of(VertexId(3)).unwrap(), 2);
        assert!(matches!(
            p(2, 2).layer_of(VertexId(8)),
            Err(Error::VertexOutOfRange { index: 8, max: 7 })
        ));
        assert!(p(2, 2).layer_of(VertexId(0)).is_err());
    }

    #[test]
    fn children_and_parents() {
        assert_eq!(p(5, 1).child(VertexId(1), 1).unwrap(), VertexId(2));
        assert_eq!(p(2, 2).child(VertexId(2), 2).unwrap(), VertexId(5));
        assert_eq!(p(3, 1).child(VertexId(1), 3).unwrap(), VertexId(4));
        assert_eq!(
            p(2, 2).child(VertexId(1), 3),
            Err(Error::ChildOutOfRange { j: 3, k: 2 })
        );
        assert_eq!(p(2, 1).child(VertexId(2), 1), Err(Error::TruncationLayer(2)));

        assert_eq!(p(2, 2).parent(VertexId(1)).unwrap(), None);
        assert_eq!(p(2, 2).parent(VertexId(5)).unwrap(), Some(VertexId(2)));
        assert_eq!(p(5, 1).parent(VertexId(6)).unwrap(), Some(VertexId(1)));
        assert!(p(2, 1).parent(VertexId(4)).is_err());
    }

    #[test]
    fn child_parent_round_trip() {
        for (k, ell) in [(2, 4), (3, 3), (4, 2), (5, 2)] {
            let q = p(k, ell);
            for t in 1..=ell {
                for v in q.layer(t) {
                    for j in 1..=k {
                        let c = q.child(v, j).unwrap();
                        assert_eq!(q.layer_of(c).unwrap(), t + 1);
                        assert_eq!(q.parent(c).unwrap(), Some(v));
                    }
                }
            }
        }
    }

    #[test]
    fn initial_configurations() {
        let c = Configuration::initial(p(2, 2));
        assert_eq!(c.chips_at(VertexId::ROOT).unwrap(), &[1, 2, 3, 4]);
        assert!(c.chips_at(VertexId(2)).unwrap().is_empty());
        let c = Configuration::initial(p(2, 0));
        assert_eq!(c.chips_at(VertexId::ROOT).unwrap(), &[1]);
        assert!(c.is_stable());
        let c = Configuration::initial(p(3, 1));
        assert_eq!(c.chips_at(VertexId::ROOT).unwrap(), &[1, 2, 3]);
        assert!(!c.is_stable());
    }

    #[test]
    fn fire_examples() {
        let c = Configuration::initial(p(2, 2));
        let a = c.fire(&FiringEvent::new(VertexId::ROOT, vec![1, 2])).unwrap();
        assert_eq!(a.dump(), "v1: 3 4\nv2: 1\nv3: 2\n");
        let b = c.fire(&FiringEvent::new(VertexId::ROOT, vec![2, 3])).unwrap();
        assert_eq!(b.dump(), "v1: 1 4\nv2: 2\nv3: 3\n");

        let c = Configuration::initial(p(3, 1));
        let a = c.fire(&FiringEvent::new(VertexId::ROOT, vec![1, 2, 3])).unwrap();
        assert_eq!(a.dump(), "v2: 1\nv3: 2\nv4: 3\n");
        assert!(a.is_stable());
        assert_eq!(a.stable_permutation().unwrap().as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn fire_errors() {
        let c = Configuration::initial(p(2, 2));
        assert_eq!(
            c.fire(&FiringEvent::new(VertexId::ROOT, vec![1, 9])),
            Err(Error::ChipAbsent { chip: 9, vertex: 1 })
        );
        assert!(matches!(
            c.fire(&FiringEvent::new(VertexId::ROOT, vec![1, 2, 3])),
            Err(Error::BadTuple { .. })
        ));
        assert!(matches!(
            c.fire(&FiringEvent::new(VertexId::ROOT, vec![2, 1])),
            Err(Error::BadTuple { .. })
        ));
        let s = Configuration::from_assignment(p(2, 1), [(2, [1]), (3, [2])]).unwrap();
        assert_eq!(
            s.fire(&FiringEvent::new(VertexId(2), vec![1, 2])),
            Err(Error::TruncationLayer(2))
        );
    }

    #[test]
    fn stability_and_invalid_configurations() {
        let s = Configuration::from_assignment(p(2, 2), [(4, [1]), (5, [3]), (6, [2]), (7, [4])])
            .unwrap();
        assert!(s.is_stable());
        assert_eq!(s.stable_permutation().unwrap().as_slice(), &[1, 3, 2, 4]);
        // chip 3 does not exist when ell = 1
        assert_eq!(
            Configuration::from_assignment(p(2, 1), [(1, vec![1]), (2, vec![2]), (3, vec![3])]),
            Err(Error::ChipOutOfRange { chip: 3, max: 2 })
        );
        assert_eq!(
            Configuration::from_assignment(p(2, 1), [(2, vec![1]), (3, vec![1])]),
            Err(Error::DuplicateChip(1))
        );
        assert_eq!(
            Configuration::from_assignment(p(2, 1), [(2, vec![1])]),
            Err(Error::MissingChip(2))
        );
        assert!(Configuration::from_assignment(p(2, 1), [(4, vec![1, 2])]).is_err());
        // root holding fewer than k chips is stable as a configuration
        let c = Configuration::from_assignment(p(2, 1), [(1, vec![1]), (3, vec![2])]).unwrap();
        assert!(c.is_stable());
        assert!(c.stable_permutation().is_none());
    }

    #[test]
    fn dump_round_trip() {
        let c = Configuration::initial(p(3, 2))
            .fire(&FiringEvent::new(VertexId::ROOT, vec![2, 5, 9]))
            .unwrap();
        let text = c.dump();
        assert_eq!(text, "v1: 1 3 4 6 7 8\nv2: 2\nv3: 5\nv4: 9\n");
        assert_eq!(Configuration::parse_dump(c.params(), &text).unwrap(), c);
        assert!(Configuration::parse_dump(c.params(), "w1: 2").is_err());
    }

    #[test]
    fn stabilize_examples() {
        let z = stabilize(&Configuration::initial(p(2, 3)), &Strategy::Unbundle).unwrap();
        assert_eq!(z.permutation.as_slice(), &[1, 5, 3, 7, 2, 6, 4, 8]);
        assert_eq!(z.plan.events.len(), 3 * 4);
        let first: Vec<_> = z.plan.events[..4].iter().map(|e| e.tuple.clone()).collect();
        assert_eq!(first, vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]);

        let one = stabilize(&Configuration::initial(p(2, 0)), &Strategy::Identity).unwrap();
        assert_eq!(one.permutation.as_slice(), &[1]);
        assert!(one.plan.events.is_empty());
    }

    #[test]
    fn stabilize_needs_initial_configuration() {
        let c = Configuration::initial(p(2, 2))
            .fire(&FiringEvent::new(VertexId::ROOT, vec![1, 2]))
            .unwrap();
        assert_eq!(stabilize(&c, &Strategy::Identity), Err(Error::NotInitial));
    }

    #[test]
    fn block_extremes() {
        assert!(block_extremes_hold(&[1, 5, 3, 7, 2, 6, 4, 8], 2));
        assert!(!block_extremes_hold(&[1, 3, 2, 4, 5, 7, 8, 6], 2));
        assert!(block_extremes_hold(&[1, 4, 7, 2, 5, 8, 3, 6, 9], 3));
    }
}
