//! Ballot walks `A_{k,m}` and the dispersions they encode.
//!
//! A walk of length `km` takes unit steps along the k coordinate axes, ends
//! at `(m, ..., m)` and keeps `x_1 >= x_2 >= ... >= x_k` on every prefix.
//! Step i of the walk names the child that receives chip i.

use std::fmt;

use crate::error::{Error, Result};
use crate::tree::ChipLabel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotWalk {
    k: u32,
    m: u64,
    steps: Vec<u32>,
}

impl BallotWalk {
    /// Validates a walk given as 1-based child indices.
    pub fn new(k: u32, m: u64, steps: Vec<u32>) -> Result<Self> {
        if steps.len() as u64 != k as u64 * m {
            return Err(Error::LengthMismatch {
                expected: (k as u64 * m) as usize,
                got: steps.len(),
            });
        }
        let mut counts = vec![0u64; k as usize];
        for (i, &s) in steps.iter().enumerate() {
            if s == 0 || s > k {
                return Err(Error::ChildOutOfRange { j: s, k });
            }
            let c = s as usize - 1;
            counts[c] += 1;
            if counts[c] > m || (c > 0 && counts[c] > counts[c - 1]) {
                return Err(Error::BallotViolation(i + 1));
            }
        }
        Ok(BallotWalk { k, m, steps })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// 1-based child index of every step.
    pub fn steps(&self) -> &[u32] {
        &self.steps
    }
}

/// Digit string for `k <= 9`, comma-separated indices otherwise.
impl fmt::Display for BallotWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k <= 9 {
            for s in &self.steps {
                write!(f, "{s}")?;
            }
        } else {
            for (i, s) in self.steps.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for BallotWalk {
    type Err = Error;

    /// Accepts either form produced by `Display`; `k` and `m` are inferred
    /// from the largest step and the length.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let steps: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad step `{t}`"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad step `{c}`"))))
                .collect::<Result<_>>()?
        };
        let k = steps.iter().copied().max().unwrap_or(1);
        let m = steps.len() as u64 / k as u64;
        BallotWalk::new(k, m, steps)
    }
}

/// Partition of chips `1..=km` among k children, `m` each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dispersion {
    parts: Vec<Vec<ChipLabel>>,
}

impl Dispersion {
    /// Validates that `parts` partition `1..=km` evenly and satisfy the
    /// ballot property on every prefix `[t]`.
    pub fn new(parts: Vec<Vec<ChipLabel>>) -> Result<Self> {
        let k = parts.len();
        if k == 0 {
            return Err(Error::InvalidDispersion("no children".into()));
        }
        let m = parts[0].len();
        let n = k * m;
        let mut owner = vec![usize::MAX; n + 1];
        for (c, part) in parts.iter().enumerate() {
            if part.len() != m {
                return Err(Error::InvalidDispersion("children receive unequal counts".into()));
            }
            for &chip in part {
                let slot = owner
                    .get_mut(chip as usize)
                    .filter(|_| chip != 0)
                    .ok_or(Error::ChipOutOfRange { chip, max: n as u32 })?;
                if *slot != usize::MAX {
                    return Err(Error::DuplicateChip(chip));
                }
                *slot = c;
            }
        }
        let steps: Vec<u32> = owner[1..].iter().map(|&c| c as u32 + 1).collect();
        BallotWalk::new(k as u32, m as u64, steps)?;
        let parts = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        Ok(Dispersion { parts })
    }

    /// `parts()[j]` holds the chips sent to child `j + 1`, ascending.
    pub fn parts(&self) -> &[Vec<ChipLabel>] {
        &self.parts
    }
}

/// Chip i goes to child `steps[i]`.
pub fn walk_to_dispersion(walk: &BallotWalk) -> Dispersion {
    let mut parts = vec![Vec::with_capacity(walk.m as usize); walk.k as usize];
    for (i, &s) in walk.steps.iter().enumerate() {
        parts[s as usize - 1].push(i as ChipLabel + 1);
    }
    Dispersion { parts }
}

pub fn dispersion_to_walk(d: &Dispersion) -> BallotWalk {
    let k = d.parts.len();
    let m = d.parts[0].len();
    let mut steps = vec![0u32; k * m];
    for (c, part) in d.parts.iter().enumerate() {
        for &chip in part {
            steps[chip as usize - 1] = c as u32 + 1;
        }
    }
    BallotWalk {
        k: k as u32,
        m: m as u64,
        steps,
    }
}

/// Lexicographic stream of `A_{k,m}`.
pub fn enumerate_ballot_walks(k: u32, m: u64) -> BallotWalks {
    BallotWalks::new(k, m)
}

/// Restartable iterator over `A_{k,m}` in lexicographic step order.
#[derive(Debug, Clone)]
pub struct BallotWalks {
    k: u32,
    m: u64,
    /// 0-based steps of the current walk.
    steps: Vec<u32>,
    counts: Vec<u64>,
    started: bool,
    done: bool,
}

impl BallotWalks {
    pub fn new(k: u32, m: u64) -> Self {
        let mut it = BallotWalks {
            k,
            m,
            steps: Vec::with_capacity((k as u64 * m) as usize),
            counts: vec![0; k as usize],
            started: false,
            done: k == 0,
        };
        it.complete();
        it
    }

    fn can_step(&self, c: usize) -> bool {
        self.counts[c] < self.m && (c == 0 || self.counts[c - 1] > self.counts[c])
    }

    /// Extends the current prefix with the smallest valid step each time.
    fn complete(&mut self) {
        let total = (self.k as u64 * self.m) as usize;
        while self.steps.len() < total {
            let c = (0..self.k as usize)
                .find(|&c| self.can_step(c))
                .expect("a ballot prefix always extends");
            self.counts[c] += 1;
            self.steps.push(c as u32);
        }
    }

    /// Moves to the lexicographic successor; false when exhausted.
    fn advance(&mut self) -> bool {
        while let Some(last) = self.steps.pop() {
            self.counts[last as usize] -= 1;
            if let Some(c) = (last as usize + 1..self.k as usize).find(|&c| self.can_step(c)) {
                self.counts[c] += 1;
                self.steps.push(c as u32);
                self.complete();
                return true;
            }
        }
        false
    }

    /// Current walk as 0-based child indices, without allocating.
    pub(crate) fn next_raw(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(&self.steps)
    }
}

impl Iterator for BallotWalks {
    type Item = BallotWalk;

    fn next(&mut self) -> Option<BallotWalk> {
        let (k, m) = (self.k, self.m);
        let steps = self.next_raw()?.iter().map(|&s| s + 1).collect();
        Some(BallotWalk { k, m, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_sequences(k: u32, len: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|s: Vec<u32>| {
                    (1..=k).map(move |c| {
                        let mut t = s.clone();
                        t.push(c);
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn is_ballot(k: u32, m: u64, s: &[u32]) -> bool {
        let mut x = vec![0u64; k as usize + 1];
        for &c in s {
            x[c as usize] += 1;
            if (2..=k as usize).any(|i| x[i] > x[i - 1]) {
                return false;
            }
        }
        (1..=k as usize).all(|i| x[i] == m)
    }

    fn brute_force(k: u32, m: u64) -> Vec<String> {
        all_sequences(k, (k as u64 * m) as usize)
            .into_iter()
            .filter(|s| is_ballot(k, m, s))
            .map(|s| s.iter().map(|d| d.to_string()).collect())
            .collect()
    }

    fn listed(k: u32, m: u64) -> Vec<String> {
        enumerate_ballot_walks(k, m).map(|w| w.to_string()).collect()
    }

    #[test]
    fn small_sets_match_brute_force() {
        assert_eq!(listed(2, 2), vec!["1122", "1212"]);
        for (k, m) in [(2, 3), (2, 4), (3, 2), (3, 3), (4, 2)] {
            assert_eq!(listed(k, m), brute_force(k, m), "k={k} m={m}");
        }
    }

    #[test]
    fn single_walks() {
        for k in 1..6 {
            let all = listed(k, 1);
            assert_eq!(all.len(), 1);
            assert_eq!(all[0], (1..=k).map(|d| d.to_string()).collect::<String>());
        }
        assert_eq!(enumerate_ballot_walks(3, 0).count(), 1);
    }

    #[test]
    fn a_2_4_endpoints() {
        let all = listed(2, 4);
        assert_eq!(all.len(), 14);
        assert_eq!(all.first().unwrap(), "11112222");
        assert_eq!(all.last().unwrap(), "12121212");
    }

    #[test]
    fn dispersion_examples() {
        let d = walk_to_dispersion(&"1212".parse().unwrap());
        assert_eq!(d.parts(), &[vec![1, 3], vec![2, 4]]);
        let d = walk_to_dispersion(&"1122".parse().unwrap());
        assert_eq!(d.parts(), &[vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn round_trips() {
        for (k, m) in [(2, 2), (2, 4), (3, 3)] {
            for w in enumerate_ballot_walks(k, m) {
                let d = walk_to_dispersion(&w);
                assert_eq!(Dispersion::new(d.parts().to_vec()).unwrap(), d);
                assert_eq!(dispersion_to_walk(&d), w);
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(BallotWalk::new(2, 2, vec![2, 1, 1, 2]), Err(Error::BallotViolation(1)));
        assert_eq!(BallotWalk::new(2, 2, vec![1, 1, 1, 2]), Err(Error::BallotViolation(3)));
        assert!(BallotWalk::new(2, 2, vec![1, 2]).is_err());
        assert!(BallotWalk::new(2, 1, vec![1, 3]).is_err());
        assert_eq!(
            Dispersion::new(vec![vec![2, 3], vec![1, 4]]),
            Err(Error::BallotViolation(1))
        );
        assert!(Dispersion::new(vec![vec![1, 2], vec![3]]).is_err());
        assert!(Dispersion::new(vec![vec![1, 1], vec![3, 4]]).is_err());
        assert!(Dispersion::new(vec![vec![1, 5], vec![3, 4]]).is_err());
    }

    #[test]
    fn wide_walks_use_commas() {
        let w = enumerate_ballot_walks(10, 1).next().unwrap();
        assert_eq!(w.to_string(), "1,2,3,4,5,6,7,8,9,10");
        assert_eq!(w.to_string().parse::<BallotWalk>().unwrap(), w);
    }
}
