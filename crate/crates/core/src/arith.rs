//! Small number-theory helpers shared by the rest of the crate.

use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;

/// Exact rational used for every element of a rank-one character group.
pub type Rational = Ratio<i64>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in increasing order, starting at 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

/// Prime factorisation `(p, v_p(n))` of `|n|`, primes increasing. Empty for 0 and ±1.
pub fn factorize(n: i64) -> Vec<(u64, u32)> {
    let mut n = n.unsigned_abs();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut n = n.unsigned_abs();
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// Fractional part of a rational, in `[0, 1)`.
pub fn frac(r: Rational) -> Rational {
    let n = r.numer().mod_floor(r.denom());
    Rational::new(n, *r.denom())
}

/// Inverse of an odd `a` modulo `2^k` (`k <= 62`).
pub(crate) fn inverse_mod_pow2(a: i64, k: u32) -> i64 {
    let m = 1i128 << k;
    let g = (a as i128).extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.mod_floor(&m) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorisation_and_valuation() {
        assert_eq!(factorize(360), alloc::vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(-49), alloc::vec![(7, 2)]);
        assert!(factorize(1).is_empty());
        assert_eq!(valuation(48, 2), 4);
        assert_eq!(valuation(48, 5), 0);
    }

    #[test]
    fn primes_start_at_two() {
        let first: Vec<u64> = primes().take(6).collect();
        assert_eq!(first, alloc::vec![2, 3, 5, 7, 11, 13]);
        assert!(!is_prime(1) && !is_prime(91) && is_prime(97));
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(Rational::new(-1, 3)), Rational::new(2, 3));
        assert_eq!(frac(Rational::new(7, 2)), Rational::new(1, 2));
        assert_eq!(frac(Rational::from_integer(-4)), Rational::from_integer(0));
    }

    #[test]
    fn inverse_mod_power_of_two() {
        for a in [1i64, 3, 5, 7, 9, 15, -3] {
            let inv = inverse_mod_pow2(a, 4);
            assert_eq!((a * inv).rem_euclid(16), 1);
        }
    }
}
