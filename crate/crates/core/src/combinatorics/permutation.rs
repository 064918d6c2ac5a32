use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest pattern accepted by [`contains_pattern`].
pub const MAX_PATTERN_LEN: usize = 8;

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(seq: Vec<u32>) -> Result<Self> {
        let n = seq.len();
        let mut seen = vec![false; n + 1];
        for &x in &seq {
            if x == 0 || x as usize > n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::NotPermutation(n));
            }
        }
        Ok(Permutation(seq))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ other` as functions on positions: `i -> self[other[i]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Permutation(other.0.iter().map(|&i| self.0[i as usize - 1]).collect()))
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.0
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    /// Space- or comma-separated 1-based values.
    fn from_str(s: &str) -> Result<Self> {
        let seq = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad value `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(seq)
    }
}

/// Space-separated, matching the CLI's plain-text form.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Number of pairs `i < j` with `p[i] > p[j]`, via a Fenwick tree.
pub fn inversions(p: &Permutation) -> u64 {
    let n = p.len();
    let mut tree = vec![0u32; n + 1];
    let mut total = 0u64;
    for (seen, &x) in p.0.iter().enumerate() {
        // values <= x already placed
        let mut i = x as usize;
        let mut le = 0u64;
        while i > 0 {
            le += tree[i] as u64;
            i &= i - 1;
        }
        total += seen as u64 - le;
        let mut i = x as usize;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    total
}

/// Length of the longest strictly decreasing subsequence.
///
/// Patience sorting on the reversed sequence: `tails[l]` is the smallest
/// possible last value of an increasing run of length `l + 1`.
pub fn lds(p: &Permutation) -> usize {
    let mut tails: Vec<u32> = Vec::new();
    for &x in p.0.iter().rev() {
        let at = tails.partition_point(|&t| t < x);
        if at == tails.len() {
            tails.push(x);
        } else {
            tails[at] = x;
        }
    }
    tails.len()
}

/// `tau[gammas...]`: block i is order-isomorphic to `gammas[i]` and the
/// blocks are ordered among themselves like `tau`.
pub fn inflate(tau: &Permutation, gammas: &[Permutation]) -> Result<Permutation> {
    if gammas.len() != tau.len() {
        return Err(Error::LengthMismatch {
            expected: tau.len(),
            got: gammas.len(),
        });
    }
    // offset of block i = total size of blocks whose tau value is smaller
    let mut by_value = vec![0usize; tau.len() + 1];
    for (i, &v) in tau.0.iter().enumerate() {
        by_value[v as usize] = gammas[i].len();
    }
    let mut offset = vec![0usize; tau.len() + 2];
    for v in 1..=tau.len() {
        offset[v + 1] = offset[v] + by_value[v];
    }
    let mut out = Vec::with_capacity(gammas.iter().map(Permutation::len).sum());
    for (i, &v) in tau.0.iter().enumerate() {
        let base = offset[v as usize] as u32;
        out.extend(gammas[i].0.iter().map(|&g| base + g));
    }
    Ok(Permutation(out))
}

/// `tau[gamma]`, the inflation with every block equal to `gamma`.
pub fn tensor(tau: &Permutation, gamma: &Permutation) -> Permutation {
    let gammas = vec![gamma.clone(); tau.len()];
    inflate(tau, &gammas).expect("block count matches by construction")
}

/// Standardization: the rank of every entry among the entries.
pub fn pattern_of(subseq: &[u64]) -> Result<Permutation> {
    let mut order: Vec<usize> = (0..subseq.len()).collect();
    order.sort_unstable_by_key(|&i| subseq[i]);
    if let Some(w) = order.windows(2).find(|w| subseq[w[0]] == subseq[w[1]]) {
        return Err(Error::DuplicateValue(subseq[w[0]]));
    }
    let mut ranks = vec![0u32; subseq.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r as u32 + 1;
    }
    Ok(Permutation(ranks))
}

/// Finds the lexicographically first positions (0-based) of an occurrence
/// of `sigma` in `w`, if any.
///
/// Depth-first over positions. A candidate is rejected as soon as it
/// disagrees with `sigma` in relative order against the chosen prefix, and
/// the remaining text is too short to finish.
pub fn contains_pattern(w: &Permutation, sigma: &Permutation) -> Result<Option<Vec<usize>>> {
    if sigma.len() > MAX_PATTERN_LEN {
        return Err(Error::PatternTooLong(sigma.len()));
    }
    if sigma.len() > w.len() {
        return Err(Error::PatternLongerThanText {
            pattern: sigma.len(),
            text: w.len(),
        });
    }
    let mut chosen = Vec::with_capacity(sigma.len());
    Ok(pattern_dfs(w.as_slice(), sigma.as_slice(), 0, &mut chosen).then_some(chosen))
}

fn pattern_dfs(w: &[u32], sigma: &[u32], from: usize, chosen: &mut Vec<usize>) -> bool {
    let j = chosen.len();
    if j == sigma.len() {
        return true;
    }
    let last_start = w.len() - (sigma.len() - j);
    for pos in from..=last_start {
        let x = w[pos];
        let consistent = chosen
            .iter()
            .zip(sigma)
            .all(|(&q, &s)| (w[q] < x) == (s < sigma[j]));
        if !consistent {
            continue;
        }
        chosen.push(pos);
        if pattern_dfs(w, sigma, pos + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
