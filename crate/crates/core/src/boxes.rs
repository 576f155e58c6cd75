use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::solenoid::HElement;

/// Finite symmetric test set `{Σ c_i g_i : |c_i| <= bound}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestBox {
    pub generators: Vec<HElement>,
    pub bound: u32,
}

/// Upper limit on distinct points of a single box.
pub const MAX_BOX_POINTS: usize = 1 << 20;

impl TestBox {
    pub fn new(generators: Vec<HElement>, bound: u32) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParams("test box needs at least one generator".into()));
        }
        if bound == 0 {
            return Err(Error::InvalidParams("test box bound must be positive".into()));
        }
        Ok(Self { generators, bound })
    }

    /// Distinct points in increasing order. Always contains 0 and is closed
    /// under negation.
    pub fn points(&self) -> Result<Vec<HElement>> {
        let b = self.bound as i64;
        let mut acc = BTreeSet::new();
        acc.insert(HElement::zero());
        for g in &self.generators {
            let mut next = BTreeSet::new();
            for p in &acc {
                for c in -b..=b {
                    next.insert(*p + *g * c);
                }
            }
            if next.len() > MAX_BOX_POINTS {
                return Err(Error::BudgetExceeded { points: next.len() as u128, cap: MAX_BOX_POINTS as u64 });
            }
            acc = next;
        }
        Ok(acc.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_symmetric_and_deduplicated() {
        let b = TestBox::new(alloc::vec![HElement::new(1, 3), HElement::new(1, 9)], 2).unwrap();
        let pts = b.points().unwrap();
        // (3 c1 + c2) / 9 with |c_i| <= 2 covers -8..=8
        assert_eq!(pts.len(), 17);
        assert!(pts.contains(&HElement::zero()));
        assert!(pts.iter().all(|p| pts.contains(&-*p)));
    }

    #[test]
    fn two_level_box_size() {
        let gens = [(1, 3), (1, 9), (1, 2), (1, 7)].map(|(n, d)| HElement::new(n, d)).to_vec();
        let pts = TestBox::new(gens.clone(), 2).unwrap().points().unwrap();
        // independent count: distinct values of the 5^4 coefficient vectors
        let mut brute = alloc::collections::BTreeSet::new();
        for c in 0..625i64 {
            let cs = [c % 5 - 2, c / 5 % 5 - 2, c / 25 % 5 - 2, c / 125 - 2];
            let y = gens.iter().zip(cs).fold(HElement::zero(), |acc, (g, k)| acc + *g * k);
            brute.insert(y);
        }
        assert_eq!(pts.len(), brute.len());
        assert_eq!(pts.len(), 305);
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(TestBox::new(alloc::vec![], 1).is_err());
        assert!(TestBox::new(alloc::vec![HElement::integer(1)], 0).is_err());
    }
}
