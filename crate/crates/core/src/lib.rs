//! Labeled chip-firing on directed k-ary trees.
//!
//! `k^ell` labeled chips start on the root of an infinite directed k-ary
//! tree. A vertex holding at least `k` chips may fire any `k` of them; the
//! i-th smallest fired chip moves to the i-th leftmost child. Every run ends
//! with exactly one chip on each vertex of layer `ell + 1`, so a stable
//! configuration reads as a permutation of `1..=k^ell`.
//!
//! The crate is split into:
//!
//! * [`tree`]: addressing, configurations, the firing rule and stabilization.
//! * [`strategy`]: deterministic tuple-selection policies.
//! * [`combinatorics`]: exact counts, ballot walks, digit reversal and
//!   permutation statistics.
//! * [`search`]: exhaustive enumeration of stable configurations and
//!   extremal searches over them.

pub mod combinatorics;
pub mod error;
pub mod search;
pub mod strategy;
pub mod tree;

pub use combinatorics::{BallotWalk, Dispersion, Permutation};
pub use error::{Error, Result};
pub use search::{EnumerationSpec, ExtremalReport, Mode};
pub use strategy::{FiringPlan, Strategy};
pub use tree::{ChipLabel, Configuration, FiringEvent, StablePermutation, TreeParams, VertexId};

/// Arbitrary-precision nonnegative integer used for exact counts.
pub type BigCount = num_bigint::BigUint;
