//! Depth-first assembly of stable permutations.
//!
//! A stable permutation is fixed by choosing, for every internal vertex, the
//! ballot walk that disperses its chips among its children. The DFS visits
//! internal vertices in preorder, so leaves are written strictly left to
//! right and the output order is the lexicographic order of the choice path
//! (root walk slowest). Chip sets live in one arena that grows and shrinks
//! with the recursion; nothing is allocated per node.

use std::ops::ControlFlow;

use crate::combinatorics::BallotWalks;
use crate::tree::ChipLabel;

/// Largest branching factor the engine supports.
pub(crate) const MAX_K: usize = 16;

/// Walk tables: `walks[h]` holds every walk of `A_{k, k^(h-1)}` back to back,
/// each `k^h` steps long, as 0-based child indices.
pub(crate) struct Tables {
    pub k: usize,
    pub walks: Vec<Vec<u8>>,
}

impl Tables {
    pub fn new(k: usize, ell: u32) -> Self {
        assert!(k <= MAX_K);
        let mut walks = vec![Vec::new()];
        for h in 1..=ell {
            let m = (k as u64).pow(h - 1);
            let mut flat = Vec::new();
            let mut it = BallotWalks::new(k as u32, m);
            while let Some(w) = it.next_raw() {
                flat.extend(w.iter().map(|&s| s as u8));
            }
            walks.push(flat);
        }
        Tables { k, walks }
    }

    pub fn walk_count(&self, height: u32) -> usize {
        let len = self.k.pow(height);
        self.walks[height as usize].len() / len
    }
}

/// Per-leaf hooks. `place` and `unplace` bracket every leaf write.
pub(crate) trait Visitor {
    fn place(&mut self, _chip: ChipLabel) {}
    fn unplace(&mut self) {}
    /// Called after every expansion with the sum of per-subtree bounds of
    /// the still-pending subtrees. Returning true abandons the branch.
    fn prune(&self, _pending_bound: u64) -> bool {
        false
    }
    fn complete(&mut self, perm: &[ChipLabel], path: &[u32]) -> ControlFlow<()>;
}

#[derive(Clone, Copy)]
struct Task {
    start: usize,
    len: usize,
    height: u32,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Counters {
    pub explored: u64,
    pub pruned: u64,
}

pub(crate) struct Dfs<'a, V> {
    tables: &'a Tables,
    /// `bounds[h]` bounds the statistic over one subtree of height h.
    bounds: &'a [u64],
    arena: Vec<ChipLabel>,
    tasks: Vec<Task>,
    out: Vec<ChipLabel>,
    path: Vec<u32>,
    pending: u64,
    pub visitor: V,
    pub counters: Counters,
}

impl<'a, V: Visitor> Dfs<'a, V> {
    pub fn new(tables: &'a Tables, bounds: &'a [u64], num_chips: usize, visitor: V) -> Self {
        Dfs {
            tables,
            bounds,
            arena: (1..=num_chips as ChipLabel).collect(),
            tasks: Vec::new(),
            out: Vec::with_capacity(num_chips),
            path: Vec::new(),
            pending: 0,
            visitor,
            counters: Counters::default(),
        }
    }

    /// Enumerates everything below the root, with the root's walk fixed to
    /// `root_walk` when given.
    pub fn run(&mut self, height: u32, root_walk: Option<usize>) -> ControlFlow<()> {
        let root = Task {
            start: 0,
            len: self.arena.len(),
            height,
        };
        match root_walk {
            Some(w) if height > 0 => {
                self.counters.explored += 1;
                self.expand(root, w);
                let r = if self.visitor.prune(self.pending) {
                    self.counters.pruned += 1;
                    ControlFlow::Continue(())
                } else {
                    self.step()
                };
                self.collapse(root);
                r
            }
            _ => {
                self.tasks.push(root);
                self.pending += self.bounds[height as usize];
                let r = self.step();
                self.tasks.pop();
                self.pending -= self.bounds[height as usize];
                r
            }
        }
    }

    /// Distributes the chips of `task` by walk number `w` and pushes the
    /// children as pending tasks, leftmost on top.
    fn expand(&mut self, task: Task, w: usize) {
        let k = self.tables.k;
        let walk = &self.tables.walks[task.height as usize][w * task.len..(w + 1) * task.len];
        let part = task.len / k;
        let base = self.arena.len();
        self.arena.resize(base + task.len, 0);
        let mut fill = [0usize; MAX_K];
        for (i, &c) in walk.iter().enumerate() {
            let c = c as usize;
            self.arena[base + c * part + fill[c]] = self.arena[task.start + i];
            fill[c] += 1;
        }
        for c in (0..k).rev() {
            self.tasks.push(Task {
                start: base + c * part,
                len: part,
                height: task.height - 1,
            });
        }
        self.pending += k as u64 * self.bounds[task.height as usize - 1];
        self.path.push(w as u32);
    }

    fn collapse(&mut self, task: Task) {
        let k = self.tables.k;
        self.path.pop();
        self.pending -= k as u64 * self.bounds[task.height as usize - 1];
        self.tasks.truncate(self.tasks.len() - k);
        self.arena.truncate(self.arena.len() - task.len);
    }

    fn step(&mut self) -> ControlFlow<()> {
        let Some(task) = self.tasks.pop() else {
            return self.visitor.complete(&self.out, &self.path);
        };
        self.pending -= self.bounds[task.height as usize];
        let mut result = ControlFlow::Continue(());
        if task.height == 0 {
            let chip = self.arena[task.start];
            self.out.push(chip);
            self.visitor.place(chip);
            if self.visitor.prune(self.pending) {
                self.counters.pruned += 1;
            } else {
                result = self.step();
            }
            self.visitor.unplace();
            self.out.pop();
        } else {
            for w in 0..self.tables.walk_count(task.height) {
                self.counters.explored += 1;
                self.expand(task, w);
                let r = if self.visitor.prune(self.pending) {
                    self.counters.pruned += 1;
                    ControlFlow::Continue(())
                } else {
                    self.step()
                };
                self.collapse(task);
                if r.is_break() {
                    result = r;
                    break;
                }
            }
        }
        self.pending += self.bounds[task.height as usize];
        self.tasks.push(task);
        result
    }
}

/// Counts completions.
#[derive(Default)]
pub(crate) struct Counter {
    pub count: u64,
}

impl Visitor for Counter {
    fn complete(&mut self, _: &[ChipLabel], _: &[u32]) -> ControlFlow<()> {
        self.count += 1;
        ControlFlow::Continue(())
    }
}

/// Collects up to `limit` permutations, flattened.
pub(crate) struct Collector {
    pub flat: Vec<ChipLabel>,
    pub count: u64,
    pub limit: u64,
}

impl Visitor for Collector {
    fn complete(&mut self, perm: &[ChipLabel], _: &[u32]) -> ControlFlow<()> {
        self.flat.extend_from_slice(perm);
        self.count += 1;
        if self.count >= self.limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

/// Best value seen so far with its canonical (first) witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Best {
    pub value: u64,
    pub witness: Vec<ChipLabel>,
    pub path: Vec<u32>,
}

impl Best {
    /// Larger value wins; ties go to the earlier path.
    pub fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.value > a.value || (b.value == a.value && b.path < a.path) {
                b
            } else {
                a
            }),
            (a, None) => a,
            (None, b) => b,
        }
    }

    fn offer(slot: &mut Option<Best>, value: u64, perm: &[ChipLabel], path: &[u32]) {
        // DFS order is canonical, so only strict improvements replace
        if slot.as_ref().is_none_or(|b| value > b.value) {
            *slot = Some(Best {
                value,
                witness: perm.to_vec(),
                path: path.to_vec(),
            });
        }
    }
}

/// Tracks the inversion count of the placed prefix with a Fenwick tree.
pub(crate) struct InversionMax {
    tree: Vec<u32>,
    placed: Vec<ChipLabel>,
    running: u64,
    added: Vec<u64>,
    pub best: Option<Best>,
}

impl InversionMax {
    pub fn new(n: usize) -> Self {
        InversionMax {
            tree: vec![0; n + 1],
            placed: Vec::with_capacity(n),
            running: 0,
            added: Vec::with_capacity(n),
            best: None,
        }
    }

    fn update(&mut self, x: usize, delta: i32) {
        let mut i = x;
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i32 + delta) as u32;
            i += i & i.wrapping_neg();
        }
    }

    fn at_most(&self, x: usize) -> u64 {
        let mut i = x;
        let mut s = 0u64;
        while i > 0 {
            s += self.tree[i] as u64;
            i &= i - 1;
        }
        s
    }
}

impl Visitor for InversionMax {
    fn place(&mut self, chip: ChipLabel) {
        let greater = self.placed.len() as u64 - self.at_most(chip as usize);
        self.running += greater;
        self.added.push(greater);
        self.placed.push(chip);
        self.update(chip as usize, 1);
    }

    fn unplace(&mut self) {
        let chip = self.placed.pop().expect("balanced place/unplace");
        self.running -= self.added.pop().expect("balanced place/unplace");
        self.update(chip as usize, -1);
    }

    fn complete(&mut self, perm: &[ChipLabel], path: &[u32]) -> ControlFlow<()> {
        Best::offer(&mut self.best, self.running, perm, path);
        ControlFlow::Continue(())
    }
}

/// Tracks the longest decreasing subsequence of the placed prefix.
///
/// `tails[l]` is the largest possible last element of a strictly decreasing
/// subsequence of length `l + 1`; it is itself strictly decreasing.
pub(crate) struct LdsMax {
    tails: Vec<ChipLabel>,
    undo: Vec<(usize, Option<ChipLabel>)>,
    /// Branches whose bound falls below this are abandoned.
    pub incumbent: u64,
    pub prune_enabled: bool,
    pub best: Option<Best>,
}

impl LdsMax {
    pub fn new(incumbent: u64, prune_enabled: bool) -> Self {
        LdsMax {
            tails: Vec::new(),
            undo: Vec::new(),
            incumbent,
            prune_enabled,
            best: None,
        }
    }
}

impl Visitor for LdsMax {
    fn place(&mut self, chip: ChipLabel) {
        let at = self.tails.partition_point(|&t| t > chip);
        if at == self.tails.len() {
            self.tails.push(chip);
            self.undo.push((at, None));
        } else {
            self.undo.push((at, Some(self.tails[at])));
            self.tails[at] = chip;
        }
    }

    fn unplace(&mut self) {
        match self.undo.pop().expect("balanced place/unplace") {
            (_, None) => {
                self.tails.pop();
            }
            (at, Some(old)) => self.tails[at] = old,
        }
    }

    fn prune(&self, pending_bound: u64) -> bool {
        // Keep branches that could tie the incumbent so the canonical first
        // optimum is always reached.
        self.prune_enabled && (self.tails.len() as u64 + pending_bound) < self.incumbent
    }

    fn complete(&mut self, perm: &[ChipLabel], path: &[u32]) -> ControlFlow<()> {
        let value = self.tails.len() as u64;
        Best::offer(&mut self.best, value, perm, path);
        self.incumbent = self.incumbent.max(value);
        ControlFlow::Continue(())
    }
}
