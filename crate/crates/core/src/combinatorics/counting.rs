use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `binom(n, r)`, built one factor at a time so every division is exact.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        let (q, rem) = acc.div_rem(&BigUint::from(i + 1));
        debug_assert!(rem.is_zero());
        acc = q;
    }
    acc
}

/// k-dimensional Catalan number: the number of ballot walks in `A_{k,m}`.
///
/// `C_{k,m} = (km)! / (m!)^k / prod_{i=1}^{k-1} binom(m+i, m)`.
pub fn kd_catalan(k: u32, m: u64) -> BigUint {
    let mut multinomial = BigUint::one();
    for i in 1..=k as u64 {
        multinomial *= binomial(i * m, m);
    }
    let mut denominator = BigUint::one();
    for i in 1..k as u64 {
        denominator *= binomial(m + i, m);
    }
    let (q, rem) = multinomial.div_rem(&denominator);
    assert!(rem.is_zero(), "C_({k},{m}) division left a remainder");
    q
}

/// Number of stable configurations from `k^ell` chips:
/// `prod_{t=1}^{ell} C_{k, k^(ell-t)} ^ (k^(t-1))`.
pub fn kappa(k: u32, ell: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(if k == 1 { Error::UnitBranching } else { Error::InvalidBranching(k) });
    }
    let mut acc = BigUint::one();
    for t in 1..=ell {
        let m = (k as u64).checked_pow(ell - t).ok_or(Error::Overflow("kappa"))?;
        let e = k.checked_pow(t - 1).ok_or(Error::Overflow("kappa"))?;
        acc *= kd_catalan(k, m).pow(e);
    }
    Ok(acc)
}

/// `(k^(2 ell) - ell k^(ell+1) + (ell-1) k^ell) / 4`, the largest inversion
/// count over stable configurations.
pub fn max_inversions_closed_form(k: u32, ell: u32) -> BigUint {
    let kb = BigUint::from(k);
    let k_ell = kb.pow(ell);
    let positive = &k_ell * &k_ell + BigUint::from(ell.saturating_sub(1)) * &k_ell;
    let mut negative = BigUint::from(ell) * &k_ell * &kb;
    if ell == 0 {
        // (ell - 1) k^ell is negative here
        negative += &k_ell;
    }
    let numerator = positive - negative;
    let (q, rem) = numerator.div_rem(&BigUint::from(4u32));
    assert!(rem.is_zero(), "max inversion formula not divisible by 4");
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan_oracle(m: u64) -> u64 {
        // C_{m+1} = sum C_i C_{m-i}
        let mut c = vec![1u64];
        for n in 1..=m as usize {
            c.push((0..n).map(|i| c[i] * c[n - 1 - i]).sum());
        }
        c[m as usize]
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 7), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(60, 30), BigUint::from(118264581564861424u64));
    }

    #[test]
    fn two_dimensional_catalan() {
        for m in 0..=20 {
            assert_eq!(kd_catalan(2, m), BigUint::from(catalan_oracle(m)), "m = {m}");
        }
        let first: Vec<_> = (1..=4).map(|m| kd_catalan(2, m)).collect();
        assert_eq!(first, [1u32, 2, 5, 14].map(BigUint::from));
    }

    #[test]
    fn small_cases() {
        for k in 1..6 {
            assert_eq!(kd_catalan(k, 0), BigUint::one());
            assert_eq!(kd_catalan(k, 1), BigUint::one());
        }
        assert_eq!(kd_catalan(3, 2), BigUint::from(5u32));
        assert_eq!(kd_catalan(3, 3), BigUint::from(42u32));
        assert_eq!(kd_catalan(1, 7), BigUint::one());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(2, 0).unwrap(), BigUint::one());
        assert_eq!(kappa(2, 1).unwrap(), BigUint::one());
        assert_eq!(kappa(2, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(kappa(2, 3).unwrap(), BigUint::from(56u32));
        assert_eq!(kappa(2, 4).unwrap(), BigUint::from(4_484_480u32));
        assert_eq!(kappa(3, 2).unwrap(), BigUint::from(42u32));
        assert_eq!(kappa(1, 2), Err(Error::UnitBranching));
    }

    #[test]
    fn kappa_recursion() {
        // kappa(ell) = C_{k, k^(ell-1)} kappa(ell-1)^k
        for k in 2..=4u32 {
            for ell in 1..=4u32 {
                let lhs = kappa(k, ell).unwrap();
                let rhs = kd_catalan(k, (k as u64).pow(ell - 1)) * kappa(k, ell - 1).unwrap().pow(k);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn max_inversion_values() {
        let v = |k, l| max_inversions_closed_form(k, l);
        assert_eq!(v(2, 3), BigUint::from(8u32));
        assert_eq!(v(2, 4), BigUint::from(44u32));
        assert_eq!(v(3, 2), BigUint::from(9u32));
        assert_eq!(v(2, 2), BigUint::from(1u32));
        for k in 2..7 {
            assert_eq!(v(k, 0), BigUint::zero());
            assert_eq!(v(k, 1), BigUint::zero());
        }
        // k = 2: 4^(ell-1) - (ell+1) 2^(ell-2), the sequence 0, 1, 8, 44, 208, ...
        let seq: Vec<_> = (1..=8).map(|l| v(2, l)).collect();
        assert_eq!(seq, [0u32, 1, 8, 44, 208, 912, 3840, 15808].map(BigUint::from));
    }
}
