//! Exact counting, ballot walks, digit reversal and permutation statistics.

mod counting;
mod digits;
mod permutation;
mod walks;

pub use counting::{binomial, kappa, kd_catalan, max_inversions_closed_form};
pub use digits::{digit_reversal, is_palindromic, palindromic_extend, to_digits, z_lds_closed_form};
pub use permutation::{
    contains_pattern, inflate, inversions, lds, pattern_of, tensor, Permutation, MAX_PATTERN_LEN,
};
pub use walks::{
    dispersion_to_walk, enumerate_ballot_walks, walk_to_dispersion, BallotWalk, BallotWalks,
    Dispersion,
};
