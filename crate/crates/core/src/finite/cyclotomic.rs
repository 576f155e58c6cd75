//! Exact arithmetic in `Z[ζ_M]`, elements stored as integer coefficient
//! vectors reduced modulo the cyclotomic polynomial `Φ_M`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

fn overflow() -> Error {
    Error::InvalidParams("exact cyclotomic arithmetic overflowed i128".into())
}

/// Coefficients of `Φ_m`, constant term first.
pub fn cyclotomic_poly(m: usize) -> Vec<i128> {
    assert!(m >= 1);
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i128; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = divide_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Quotient of `a` by the monic `b`, assuming exact division.
fn divide_exact(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i128; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db];
        q[k] = c;
        for (t, bt) in b.iter().enumerate() {
            rem[k + t] -= c * bt;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// The ring `Z[x]/Φ_M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicRing {
    order: usize,
    phi: Vec<i128>,
}

/// Element of a [`CyclotomicRing`]; length `deg Φ_M`.
pub type Cyclo = Vec<i128>;

impl CyclotomicRing {
    pub fn new(order: usize) -> Self {
        Self { order, phi: cyclotomic_poly(order) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduce an arbitrary coefficient vector (constant term first).
    pub fn reduce(&self, a: &[i128]) -> Result<Cyclo> {
        let d = self.degree();
        let mut rem = a.to_vec();
        if rem.len() < d {
            rem.resize(d, 0);
        }
        for k in (d..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            for (t, p) in self.phi.iter().enumerate() {
                let idx = k - d + t;
                rem[idx] = rem[idx].checked_sub(c.checked_mul(*p).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
        }
        rem.truncate(d);
        Ok(rem)
    }

    /// `Σ_e counts[e]·ζ^e`, exponents taken mod `M`.
    pub fn from_exponents(&self, counts: &[i128]) -> Result<Cyclo> {
        let mut v = vec![0i128; self.order];
        for (e, c) in counts.iter().enumerate() {
            v[e % self.order] += c;
        }
        self.reduce(&v)
    }

    pub fn from_integer(&self, k: i128) -> Cyclo {
        let mut v = vec![0; self.degree()];
        v[0] = k;
        v
    }

    pub fn mul(&self, a: &Cyclo, b: &Cyclo) -> Result<Cyclo> {
        let mut out = vec![0i128; a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = x.checked_mul(*y).ok_or_else(overflow)?;
                out[i + j] = out[i + j].checked_add(t).ok_or_else(overflow)?;
            }
        }
        self.reduce(&out)
    }

    pub fn scale(&self, a: &Cyclo, k: i128) -> Result<Cyclo> {
        a.iter().map(|x| x.checked_mul(k).ok_or_else(overflow)).collect()
    }

    pub fn is_zero(a: &Cyclo) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// The integer `a` represents, if it is one.
    pub fn as_integer(a: &Cyclo) -> Option<i128> {
        a[1..].iter().all(|&x| x == 0).then(|| a[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_poly(105).contains(&-2));
        assert_eq!(cyclotomic_poly(105).len() - 1, 48);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for m in [2usize, 5, 6, 12] {
            let r = CyclotomicRing::new(m);
            let all = r.from_exponents(&vec![1; m]).unwrap();
            assert!(CyclotomicRing::is_zero(&all));
            let zeta = r.from_exponents(&[0, 1]).unwrap();
            let mut p = r.from_integer(1);
            for _ in 0..m {
                p = r.mul(&p, &zeta).unwrap();
            }
            assert_eq!(CyclotomicRing::as_integer(&p), Some(1));
        }
    }
}
