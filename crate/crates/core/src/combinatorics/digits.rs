//! Base-k digit strings: digit reversal and palindromic sequences.
//!
//! Strings are most-significant digit first and zero-padded to exactly
//! `ell` digits.

use crate::error::{Error, Result};

use super::Permutation;

const MAX_LEN: u64 = 1 << 28;

fn checked_size(k: u32, ell: u32) -> Result<u64> {
    if k < 2 {
        return Err(if k == 1 { Error::UnitBranching } else { Error::InvalidBranching(k) });
    }
    (k as u64)
        .checked_pow(ell)
        .filter(|&n| n <= MAX_LEN)
        .ok_or(Error::TooLarge { k, ell })
}

/// `ell` base-k digits of `value`, most significant first.
pub fn to_digits(k: u32, ell: u32, mut value: u64) -> Vec<u32> {
    let mut digits = vec![0; ell as usize];
    for d in digits.iter_mut().rev() {
        *d = (value % k as u64) as u32;
        value /= k as u64;
    }
    digits
}

fn reverse_value(k: u32, ell: u32, mut value: u64) -> u64 {
    let mut out = 0;
    for _ in 0..ell {
        out = out * k as u64 + value % k as u64;
        value /= k as u64;
    }
    out
}

/// Position p (1-based) holds 1 + the ell-digit base-k reversal of p - 1.
pub fn digit_reversal(k: u32, ell: u32) -> Result<Permutation> {
    let n = checked_size(k, ell)?;
    let seq = (0..n).map(|i| reverse_value(k, ell, i) as u32 + 1).collect();
    Permutation::new(seq)
}

/// True iff the i-th value's digit string reverses the i-th-from-last.
pub fn is_palindromic(k: u32, ell: u32, values: &[u64]) -> Result<bool> {
    let bound = checked_size(k, ell)?;
    if let Some(&value) = values.iter().find(|&&v| v >= bound) {
        return Err(Error::ValueOutOfRange { value, bound });
    }
    let n = values.len();
    Ok((0..n).all(|i| reverse_value(k, ell, values[i]) == values[n - 1 - i]))
}

/// Longest decreasing subsequence length of the digit-reversal permutation.
pub fn z_lds_closed_form(k: u32, ell: u32) -> Result<u64> {
    if ell == 0 {
        return Err(Error::ZeroDepth);
    }
    let k64 = k as u64;
    let overflow = || Error::Overflow("z_lds_closed_form");
    if ell.is_multiple_of(2) {
        let p = k64.checked_pow(ell / 2 - 1).ok_or_else(overflow)?;
        (k64 + 1).checked_mul(p).map(|v| v - 1).ok_or_else(overflow)
    } else {
        let p = k64.checked_pow((ell - 1) / 2).ok_or_else(overflow)?;
        p.checked_mul(2).map(|v| v - 1).ok_or_else(overflow)
    }
}

/// Grows a decreasing, zero-free palindromic sequence of `ell`-digit strings
/// of length `d` into one of `ell + 2` digits and length `kd + k - 1`.
///
/// Group g (for g = 0..k) wraps every input string as `(k-1-g) b_i g`.
/// Consecutive groups are joined by a bridge string. The bridge after group
/// g is `(k-2-g) (k-1)^ell g`; when the input starts with the all-`(k-1)`
/// string that bridge would not sit below the next group, so
/// `(k-1-g) 0^ell (g+1)` is used instead.
pub fn palindromic_extend(k: u32, ell: u32, values: &[u64]) -> Result<Vec<u64>> {
    let bound = checked_size(k, ell)?;
    checked_size(k, ell + 2)?;
    if values.is_empty() {
        return Err(Error::PalindromicPrecondition("empty input"));
    }
    if values.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::PalindromicPrecondition("input is not strictly decreasing"));
    }
    if values.contains(&0) {
        return Err(Error::PalindromicPrecondition("input contains zero"));
    }
    if !is_palindromic(k, ell, values)? {
        return Err(Error::PalindromicPrecondition("input is not palindromic"));
    }

    let k = k as u64;
    let wrap = |lead: u64, core: u64, trail: u64| (lead * bound + core) * k + trail;
    let full = bound - 1;
    let d = values.len() as u64;
    let mut out = Vec::with_capacity((k * d + k - 1) as usize);
    for g in 0..k {
        let lead = k - 1 - g;
        out.extend(values.iter().map(|&b| wrap(lead, b, g)));
        if g + 1 < k {
            out.push(if values[0] != full {
                wrap(lead - 1, full, g)
            } else {
                wrap(lead, 0, g + 1)
            });
        }
    }
    Ok(out)
}
