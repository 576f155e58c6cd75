use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::group::{Element, FiniteGroup};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Exact probability vector on a finite group, stored as integer weights
/// over one common denominator (reduced).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dist {
    weights: Vec<u64>,
    total: u64,
}

impl Dist {
    /// From nonnegative weights indexed like [`FiniteGroup::element`].
    pub fn from_weights(g: &FiniteGroup, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != g.order() {
            return Err(Error::InvalidParams(format!("{} weights for a group of order {}", weights.len(), g.order())));
        }
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParams("weights sum to zero".into()));
        }
        let d = weights.iter().fold(total, |acc, w| acc.gcd(w));
        Ok(Self { weights: weights.into_iter().map(|w| w / d).collect(), total: total / d })
    }

    /// From exact probabilities; they must be nonnegative and sum to 1.
    pub fn from_probs(g: &FiniteGroup, probs: impl IntoIterator<Item = (Element, Rational)>) -> Result<Self> {
        let mut dense = vec![Rational::from_integer(0); g.order()];
        for (x, p) in probs {
            if p < Rational::from_integer(0) {
                return Err(Error::InvalidParams(format!("negative probability at {x:?}")));
            }
            let x = g.reduce(&x.iter().map(|v| *v as i64).collect::<Vec<_>>())?;
            dense[g.index(&x)] += p;
        }
        if dense.iter().sum::<Rational>() != Rational::from_integer(1) {
            return Err(Error::InvalidParams("probabilities do not sum to 1".into()));
        }
        let den = dense.iter().fold(1i64, |acc, p| acc.lcm(p.denom()));
        let weights = dense.iter().map(|p| (p.numer() * (den / p.denom())) as u64).collect();
        Self::from_weights(g, weights)
    }

    pub fn degenerate(g: &FiniteGroup, x: &[u64]) -> Self {
        let mut w = vec![0; g.order()];
        w[g.index(x)] = 1;
        Self { weights: w, total: 1 }
    }

    /// Uniform on a set of element indices (duplicates ignored).
    pub fn uniform_on(g: &FiniteGroup, set: &[usize]) -> Result<Self> {
        let mut w = vec![0; g.order()];
        for &i in set {
            if i >= g.order() {
                return Err(Error::InvalidParams(format!("index {i} outside the group")));
            }
            w[i] = 1;
        }
        Self::from_weights(g, w)
    }

    /// `m_K ∗ E_x` with `K` generated by `gens`.
    pub fn shifted_haar(g: &FiniteGroup, gens: &[Element], x: &[u64]) -> Self {
        let coset: Vec<usize> = g.subgroup(gens).into_iter().map(|k| g.index(&g.add(&g.element(k), x))).collect();
        Self::uniform_on(g, &coset).expect("coset is nonempty")
    }

    pub fn haar(g: &FiniteGroup) -> Self {
        Self { weights: vec![1; g.order()], total: g.order() as u64 }
    }

    /// `c·E_0 + (1 - c)·m_G`.
    pub fn atom_plus_haar(g: &FiniteGroup, c: Rational) -> Result<Self> {
        let n = Rational::from_integer(g.order() as i64);
        let haar = (Rational::from_integer(1) - c) / n;
        Self::from_probs(g, g.elements().enumerate().map(|(i, x)| (x, if i == 0 { c + haar } else { haar })))
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn prob(&self, idx: usize) -> Rational {
        Rational::new(self.weights[idx] as i64, self.total as i64)
    }

    /// Indices with positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0).collect()
    }
}

/// Shape of [`random_dist`] output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Every element gets an integer weight uniform in `0..=4`.
    Dirichlet,
    /// One to three distinct elements with integer weights uniform in `1..=4`.
    Sparse,
}

/// Reproducible random distribution: weights drawn from ChaCha8 seeded with
/// `seed`, then normalised exactly. An all-zero draw falls back to the
/// degenerate distribution at a random element.
pub fn random_dist(g: &FiniteGroup, seed: u64, profile: Profile) -> Dist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut w = vec![0u64; n];
    match profile {
        Profile::Dirichlet => {
            for slot in w.iter_mut() {
                *slot = rng.gen_range(0..=4);
            }
            if w.iter().all(|&v| v == 0) {
                w[rng.gen_range(0..n)] = 1;
            }
        }
        Profile::Sparse => {
            let size = rng.gen_range(1..=n.min(3));
            let mut placed = 0;
            while placed < size {
                let i = rng.gen_range(0..n);
                if w[i] == 0 {
                    w[i] = rng.gen_range(1..=4);
                    placed += 1;
                }
            }
        }
    }
    Dist::from_weights(g, w).expect("nonzero weights")
}

/// Result of [`idempotent_classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdempotentClass {
    pub is_shifted_idempotent: bool,
    /// Sorted element indices of `K`.
    pub k: Option<Vec<usize>>,
    pub x: Option<Element>,
}

/// Whether `d = m_K ∗ E_x`: uniform on a coset of a subgroup.
pub fn idempotent_classify(g: &FiniteGroup, d: &Dist) -> IdempotentClass {
    let none = IdempotentClass { is_shifted_idempotent: false, k: None, x: None };
    let support = d.support();
    let w0 = d.weights()[support[0]];
    if support.iter().any(|&i| d.weights()[i] != w0) {
        return none;
    }
    let x = g.element(support[0]);
    let minus_x = g.neg(&x);
    let mut k: Vec<usize> = support.iter().map(|&i| g.index(&g.add(&g.element(i), &minus_x))).collect();
    k.sort_unstable();
    if !g.is_subgroup(&k) {
        return none;
    }
    IdempotentClass { is_shifted_idempotent: true, k: Some(k), x: Some(x) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(ms: &[u64]) -> FiniteGroup {
        FiniteGroup::new(ms.to_vec()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let z4 = z(&[4]);
        let d = Dist::shifted_haar(&z4, &[vec![2]], &[1]);
        let c = idempotent_classify(&z4, &d);
        assert!(c.is_shifted_idempotent);
        assert_eq!(c.k, Some(vec![0, 2]));
        assert_eq!(c.x, Some(vec![1]));

        let z5 = z(&[5]);
        let u = Dist::uniform_on(&z5, &[0, 1]).unwrap();
        assert!(!idempotent_classify(&z5, &u).is_shifted_idempotent);
        let e3 = idempotent_classify(&z5, &Dist::degenerate(&z5, &[3]));
        assert_eq!(e3.k, Some(vec![0]));
        assert_eq!(e3.x, Some(vec![3]));
        let skew = Dist::from_weights(&z4, vec![1, 0, 2, 0]).unwrap();
        assert!(!idempotent_classify(&z4, &skew).is_shifted_idempotent);
    }

    #[test]
    fn probabilities_are_exact() {
        let g = z(&[4]);
        let d = Dist::atom_plus_haar(&g, Rational::new(1, 2)).unwrap();
        assert_eq!(d.prob(0), Rational::new(5, 8));
        assert_eq!(d.prob(3), Rational::new(1, 8));
        let half = Rational::new(1, 2);
        assert!(Dist::from_probs(&g, [(vec![0], half)]).is_err());
        assert!(Dist::from_probs(&g, [(vec![0], half), (vec![5], half)]).is_ok());
    }

    #[test]
    fn random_dists_sum_to_one_and_are_reproducible() {
        let g = z(&[2, 3]);
        for seed in 0..50 {
            for profile in [Profile::Dirichlet, Profile::Sparse] {
                let d = random_dist(&g, seed, profile);
                assert_eq!(d.weights().iter().sum::<u64>(), d.total());
                assert_eq!(d, random_dist(&g, seed, profile));
            }
            assert!(random_dist(&g, seed, Profile::Sparse).support().len() <= 3);
        }
    }

    #[test]
    fn different_seeds_rarely_collide() {
        let g = z(&[5]);
        let draws: Vec<Dist> = (0..100).map(|s| random_dist(&g, s, Profile::Dirichlet)).collect();
        let mut collisions = 0;
        for i in 0..draws.len() {
            for j in i + 1..draws.len() {
                collisions += usize::from(draws[i] == draws[j]);
            }
        }
        // 5^5 - 1 equally likely nonzero draws (before reduction): expected
        // collisions among 4950 pairs is well under 10.
        assert!(collisions < 10, "{collisions} collisions");
    }
}
