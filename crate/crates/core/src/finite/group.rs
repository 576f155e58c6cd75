use alloc::format;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default cap on `|G|`.
pub const MAX_ORDER: u64 = 2000;

/// `G = Z(m_1) × … × Z(m_r)`. Elements are tuples reduced mod `m_i`, and
/// are also addressed by their mixed-radix index (last coordinate fastest).
///
/// The character group is identified with `G` itself through the pairing
/// `(x, y) = exp(2πi Σ x_i y_i / m_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    moduli: Vec<u64>,
    order: usize,
    exponent: u64,
}

pub type Element = Vec<u64>;

impl FiniteGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        Self::with_cap(moduli, MAX_ORDER)
    }

    pub fn with_cap(moduli: Vec<u64>, cap: u64) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|&m| m < 2) {
            return Err(Error::InvalidParams(format!("moduli must be at least 2, got {moduli:?}")));
        }
        let mut order = 1u128;
        for &m in &moduli {
            order *= m as u128;
            if order > cap as u128 {
                return Err(Error::BudgetExceeded { points: order, cap });
            }
        }
        let exponent = moduli.iter().fold(1u64, |acc, m| acc.lcm(m));
        Ok(Self { moduli, order: order as usize, exponent })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `lcm(m_i)`; every pairing value is a power of a primitive root of
    /// unity of this order.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn reduce(&self, x: &[i64]) -> Result<Element> {
        if x.len() != self.rank() {
            return Err(Error::InvalidParams(format!("element {x:?} has the wrong length")));
        }
        Ok(x.iter().zip(&self.moduli).map(|(v, m)| v.rem_euclid(*m as i64) as u64).collect())
    }

    pub fn index(&self, x: &[u64]) -> usize {
        x.iter().zip(&self.moduli).fold(0usize, |acc, (v, m)| acc * *m as usize + *v as usize)
    }

    pub fn element(&self, mut idx: usize) -> Element {
        let mut out = alloc::vec![0; self.rank()];
        for (slot, m) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % *m as usize) as u64;
            idx /= *m as usize;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(|i| self.element(i))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x + y) % m).collect()
    }

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        self.index(&self.add(&self.element(a), &self.element(b)))
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        a.iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect()
    }

    /// `e` with `(x, y) = exp(2πi e / exponent)`.
    pub fn pairing(&self, x: &[u64], y: &[u64]) -> u64 {
        let big = self.exponent as u128;
        let mut acc = 0u128;
        for ((a, b), m) in x.iter().zip(y).zip(&self.moduli) {
            acc += (*a as u128 * *b as u128 % *m as u128) * (big / *m as u128);
        }
        (acc % big) as u64
    }

    /// Subgroup generated by `gens`, as sorted element indices.
    pub fn subgroup(&self, gens: &[Element]) -> Vec<usize> {
        let mut member = alloc::vec![false; self.order];
        member[0] = true;
        let mut frontier = alloc::vec![self.element(0)];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let s = self.add(&x, g);
                let i = self.index(&s);
                if !member[i] {
                    member[i] = true;
                    frontier.push(s);
                }
            }
        }
        (0..self.order).filter(|&i| member[i]).collect()
    }

    /// `A(Y, K) = {y : (x, y) = 1 for x ∈ K}`, `K` generated by `gens`.
    pub fn annihilator(&self, gens: &[Element]) -> Vec<usize> {
        (0..self.order)
            .filter(|&i| {
                let y = self.element(i);
                gens.iter().all(|g| self.pairing(g, &y) == 0)
            })
            .collect()
    }

    /// Whether the sorted index set `s` contains 0 and is closed under `+`.
    pub fn is_subgroup(&self, s: &[usize]) -> bool {
        s.first() == Some(&0)
            && s.iter().all(|&a| s.iter().all(|&b| s.binary_search(&self.add_idx(a, b)).is_ok()))
    }
}

/// Endomorphism of `G` given by an integer matrix: `(Ax)_j = Σ_i a_ji x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AutMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl AutMatrix {
    /// Checks shape and that each entry is a homomorphism `Z(m_i) → Z(m_j)`.
    pub fn new(g: &FiniteGroup, entries: Vec<Vec<i64>>) -> Result<Self> {
        let r = g.rank();
        if entries.len() != r || entries.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidParams(format!("matrix must be {r}x{r}")));
        }
        for (j, row) in entries.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                let (mi, mj) = (g.moduli[i] as i128, g.moduli[j] as i128);
                if (*a as i128 * mi) % mj != 0 {
                    return Err(Error::NotHomomorphism { row: j, col: i });
                }
            }
        }
        Ok(Self { entries })
    }

    /// `k` times the identity.
    pub fn scalar(g: &FiniteGroup, k: i64) -> Self {
        let r = g.rank();
        let entries = (0..r).map(|j| (0..r).map(|i| if i == j { k } else { 0 }).collect()).collect();
        Self { entries }
    }

    pub fn apply(&self, g: &FiniteGroup, x: &[u64]) -> Element {
        self.entries
            .iter()
            .zip(g.moduli())
            .map(|(row, m)| {
                let s: i128 = row.iter().zip(x).map(|(a, v)| *a as i128 * *v as i128).sum();
                s.rem_euclid(*m as i128) as u64
            })
            .collect()
    }

    /// Image of every element index.
    pub fn table(&self, g: &FiniteGroup) -> Vec<usize> {
        g.elements().map(|x| g.index(&self.apply(g, &x))).collect()
    }

    /// Bijectivity by enumerating the image.
    pub fn is_automorphism(&self, g: &FiniteGroup) -> bool {
        let mut seen = alloc::vec![false; g.order()];
        for i in self.table(g) {
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    /// The adjoint on characters, `(Ax, y) = (x, Ãy)`: `ã_ij = a_ji·m_i/m_j`.
    pub fn adjoint(&self, g: &FiniteGroup) -> AutMatrix {
        let m = g.moduli();
        let r = g.rank();
        let entries = (0..r)
            .map(|i| (0..r).map(|j| self.entries[j][i] * m[i] as i64 / m[j] as i64).collect())
            .collect();
        AutMatrix { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn indexing_round_trips() {
        let g = FiniteGroup::new(vec![4, 3]).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(g.exponent(), 12);
        for i in 0..12 {
            assert_eq!(g.index(&g.element(i)), i);
        }
        assert_eq!(g.element(5), vec![1, 2]);
        assert!(FiniteGroup::new(vec![1]).is_err());
        assert!(matches!(FiniteGroup::new(vec![50, 50]), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn annihilator_examples() {
        let g = FiniteGroup::new(vec![4]).unwrap();
        assert_eq!(g.annihilator(&[vec![2]]), vec![0, 2]);
        assert_eq!(g.annihilator(&[]).len(), 4);
        assert_eq!(g.annihilator(&[vec![1]]), vec![0]);
    }

    #[test]
    fn annihilator_duality() {
        let g = FiniteGroup::new(vec![4, 6]).unwrap();
        for gens in [vec![vec![2, 0]], vec![vec![1, 3]], vec![vec![0, 2], vec![2, 0]], vec![]] {
            let k = g.subgroup(&gens);
            let a = g.annihilator(&gens);
            assert_eq!(k.len() * a.len(), g.order());
            let a_elems: Vec<Element> = a.iter().map(|&i| g.element(i)).collect();
            assert_eq!(g.annihilator(&a_elems), k);
            assert!(g.is_subgroup(&k) && g.is_subgroup(&a));
        }
    }

    #[test]
    fn automorphism_examples() {
        let z5 = FiniteGroup::new(vec![5]).unwrap();
        let a = AutMatrix::new(&z5, vec![vec![2]]).unwrap();
        assert!(a.is_automorphism(&z5));
        assert_eq!(a.adjoint(&z5), a);
        let z4 = FiniteGroup::new(vec![4]).unwrap();
        assert!(!AutMatrix::scalar(&z4, 2).is_automorphism(&z4));
        let z23 = FiniteGroup::new(vec![2, 3]).unwrap();
        assert!(AutMatrix::new(&z23, vec![vec![1, 0], vec![0, 2]]).unwrap().is_automorphism(&z23));
        assert_eq!(AutMatrix::new(&z23, vec![vec![1, 1], vec![0, 1]]), Err(Error::NotHomomorphism { row: 0, col: 1 }));
    }

    #[test]
    fn adjoint_pairing_identity() {
        let g = FiniteGroup::new(vec![2, 4]).unwrap();
        // Z(4) → Z(2) by reduction, Z(2) → Z(4) by doubling
        let a = AutMatrix::new(&g, vec![vec![1, 1], vec![2, 3]]).unwrap();
        let adj = a.adjoint(&g);
        for x in g.elements() {
            for y in g.elements() {
                assert_eq!(g.pairing(&a.apply(&g, &x), &y), g.pairing(&x, &adj.apply(&g, &y)));
            }
        }
    }
}
