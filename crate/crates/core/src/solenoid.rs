//! Exact arithmetic in the character group `H_a ⊂ Q` of an a-adic solenoid.
//!
//! A solenoid is described by its supernatural number, i.e. by the height
//! `h_p ∈ {0, 1, …, ∞}` of every prime: `y ∈ H_a` iff `v_p(den y) <= h_p` for
//! all primes `p`. Only finitely many primes may differ from the default
//! height, which keeps every question below decidable.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};

/// Height of a prime in a supernatural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub fn is_infinite(self) -> bool {
        matches!(self, Height::Infinite)
    }

    /// Whether an exponent `e` is admissible under this height.
    pub fn admits(self, e: u32) -> bool {
        match self {
            Height::Finite(h) => e <= h,
            Height::Infinite => true,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite description of the height function `p ↦ h_p`.
///
/// Canonical form: every key of `exceptions` is prime and its height differs
/// from `default`. Construct through [`SupernaturalSpec::new`] to enforce it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupernaturalSpec {
    default: Height,
    exceptions: BTreeMap<u64, Height>,
}

impl SupernaturalSpec {
    pub fn new(default: Height, exceptions: impl IntoIterator<Item = (u64, Height)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, h) in exceptions {
            if !arith::is_prime(p) {
                return Err(Error::InvalidParams(alloc::format!("{p} is not prime")));
            }
            if map.insert(p, h).is_some() {
                return Err(Error::InvalidParams(alloc::format!("prime {p} listed twice")));
            }
        }
        map.retain(|_, h| *h != default);
        Ok(Self { default, exceptions: map })
    }

    /// Every prime has height `default`.
    pub fn uniform(default: Height) -> Self {
        Self { default, exceptions: BTreeMap::new() }
    }

    /// `a = (2, 3, 5, 7, …)`: squarefree denominators.
    pub fn squarefree() -> Self {
        Self::uniform(Height::Finite(1))
    }

    /// `a = (2, 3, 4, …)`: the full rationals.
    pub fn rationals() -> Self {
        Self::uniform(Height::Infinite)
    }

    /// `{m / p^k}`: only the prime `p` may appear in denominators.
    pub fn p_power(p: u64) -> Result<Self> {
        Self::new(Height::Finite(0), [(p, Height::Infinite)])
    }

    pub fn default_height(&self) -> Height {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, Height> {
        &self.exceptions
    }

    pub fn height(&self, p: u64) -> Height {
        self.exceptions.get(&p).copied().unwrap_or(self.default)
    }

    /// Membership in `H_a`. Integers always belong.
    pub fn contains(&self, y: &HElement) -> bool {
        arith::factorize(*y.0.denom())
            .into_iter()
            .all(|(p, e)| self.height(p).admits(e))
    }

    /// The unique `t ∈ H_a` with `2t = y`.
    pub fn halve(&self, y: &HElement) -> Result<HElement> {
        if !self.contains(y) {
            return Err(Error::NotMember(*y));
        }
        let t = HElement(y.0 / 2);
        if self.contains(&t) {
            Ok(t)
        } else {
            Err(Error::NotDivisible(*y))
        }
    }

    /// Whether `y ∈ Y^(k) = k·H_a` (`k = 0` gives the trivial subgroup).
    pub fn is_multiple_of(&self, y: &HElement, k: i64) -> bool {
        if k == 0 {
            return y.is_zero();
        }
        self.contains(&HElement(y.0 / k))
    }

    /// Class of `y` in `Y / Y^(2^k)`.
    ///
    /// When `h_2 = e < ∞` the map `y ↦ 2^e·y (mod 2^k)`, read 2-adically, is an
    /// isomorphism `Y / Y^(2^k) ≅ Z(2^k)`; its value is the residue. When
    /// `h_2 = ∞` every element is infinitely 2-divisible and the quotient is
    /// trivial.
    pub fn coset_mod_2k(&self, y: &HElement, k: u32) -> Result<CosetLabel> {
        if !(1..=32).contains(&k) {
            return Err(Error::InvalidParams(alloc::format!("coset exponent {k} out of range")));
        }
        if !self.contains(y) {
            return Err(Error::NotMember(*y));
        }
        let e = match self.height(2) {
            Height::Infinite => return Ok(CosetLabel { modulus: 1, residue: 0 }),
            Height::Finite(e) => e,
        };
        let modulus = 1u64 << k;
        if y.is_zero() {
            return Ok(CosetLabel { modulus, residue: 0 });
        }
        let num = *y.0.numer();
        let den = *y.0.denom();
        let a = arith::valuation(den, 2);
        let odd_den = den >> a;
        // 2^e·y = num·2^(e-a) / odd_den, with a <= e by membership
        let shift = e - a;
        let pow = if shift >= k { 0 } else { 1i128 << shift };
        let m = modulus as i128;
        let inv = arith::inverse_mod_pow2(odd_den, k) as i128;
        let residue = ((num as i128).mod_floor(&m) * pow % m * inv).mod_floor(&m);
        Ok(CosetLabel { modulus, residue: residue as u64 })
    }

    /// Multiplication by `r` is an automorphism of `H_a` iff every prime of
    /// `r`'s numerator and denominator has infinite height.
    pub fn is_automorphism(&self, r: &Multiplier) -> bool {
        let num = *r.0.numer();
        let den = *r.0.denom();
        arith::factorize(num)
            .into_iter()
            .chain(arith::factorize(den))
            .all(|(p, _)| self.height(p).is_infinite())
    }

    /// Smallest prime of infinite height.
    pub fn smallest_automorphic_prime(&self) -> Option<u64> {
        match self.default {
            Height::Infinite => arith::primes().find(|p| self.height(*p).is_infinite()),
            Height::Finite(_) => self
                .exceptions
                .iter()
                .find(|(_, h)| h.is_infinite())
                .map(|(p, _)| *p),
        }
    }

    /// Smallest prime of finite height.
    pub fn smallest_non_automorphic_prime(&self) -> Option<u64> {
        match self.default {
            Height::Finite(_) => arith::primes().find(|p| !self.height(*p).is_infinite()),
            Height::Infinite => self
                .exceptions
                .iter()
                .find(|(_, h)| !h.is_infinite())
                .map(|(p, _)| *p),
        }
    }

    /// Dichotomy of the three-forms problem: case 1 when no prime acts as an
    /// automorphism, case 2 otherwise.
    pub fn classify(&self) -> SolenoidClass {
        let witness_prime = self.smallest_automorphic_prime();
        SolenoidClass {
            case: if witness_prime.is_some() {
                SolenoidCase::SomePrimeAutomorphism
            } else {
                SolenoidCase::NoPrimeAutomorphism
            },
            witness_prime,
            smallest_non_aut_prime: self.smallest_non_automorphic_prime(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolenoidCase {
    /// `f_p ∉ Aut(X)` for every prime `p`; `Aut(X) = {I, -I}`.
    NoPrimeAutomorphism,
    /// `f_p ∈ Aut(X)` for some prime `p`.
    SomePrimeAutomorphism,
}

impl SolenoidCase {
    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Self::NoPrimeAutomorphism => 1,
            Self::SomePrimeAutomorphism => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SolenoidClass {
    pub case: SolenoidCase,
    pub witness_prime: Option<u64>,
    pub smallest_non_aut_prime: Option<u64>,
}

/// Class of an element in `Y / Y^(modulus)`, `modulus` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CosetLabel {
    pub modulus: u64,
    pub residue: u64,
}

impl CosetLabel {
    pub fn in_subgroup(&self) -> bool {
        self.residue == 0
    }
}

/// An exact rational regarded as an element of some `H_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HElement(pub Rational);

impl HElement {
    pub fn new(num: i64, den: i64) -> Self {
        Self(Rational::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Self(Rational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `self / g` when it is an integer.
    pub fn multiple_of(&self, g: &HElement) -> Option<i64> {
        if g.is_zero() {
            return None;
        }
        let q = self.0 / g.0;
        q.is_integer().then(|| q.to_integer())
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Rational> for HElement {
    fn from(r: Rational) -> Self {
        Self(r)
    }
}

impl Add for HElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for HElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for HElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul<i64> for HElement {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        Self(self.0 * k)
    }
}

/// The endomorphism `y ↦ ratio·y` of a subgroup of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiplier(Rational);

impl Multiplier {
    pub fn new(ratio: Rational) -> Result<Self> {
        if ratio.is_zero() {
            return Err(Error::InvalidParams("zero multiplier".into()));
        }
        Ok(Self(ratio))
    }

    pub fn integer(k: i64) -> Self {
        assert!(k != 0, "zero multiplier");
        Self(Rational::from_integer(k))
    }

    pub fn identity() -> Self {
        Self(Rational::one())
    }

    pub fn ratio(&self) -> Rational {
        self.0
    }

    pub fn apply(&self, y: &HElement) -> HElement {
        HElement(self.0 * y.0)
    }

    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        Multiplier(self.0 * other.0)
    }

    pub fn inverse(&self) -> Multiplier {
        Multiplier(self.0.recip())
    }
}

/// A finitely generated, hence cyclic, subgroup of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FgSubgroup {
    /// Nonnegative generator; 0 encodes the trivial subgroup.
    pub generator: HElement,
}

impl FgSubgroup {
    pub fn contains(&self, y: &HElement) -> bool {
        if self.generator.is_zero() {
            y.is_zero()
        } else {
            y.multiple_of(&self.generator).is_some()
        }
    }
}

/// Rational gcd of the inputs: `gcd(numerators) / lcm(denominators)`.
pub fn fg_generator(gens: &[HElement]) -> FgSubgroup {
    fg_generator_with_certificate(gens).0
}

/// Generator together with integer coefficients `c` such that
/// `Σ c_i·gens_i = generator`.
pub fn fg_generator_with_certificate(gens: &[HElement]) -> (FgSubgroup, Vec<i64>) {
    let l = gens.iter().fold(1i64, |acc, g| acc.lcm(g.0.denom()));
    // scale to integers, then run extended gcd across the list
    let ints: Vec<i64> = gens.iter().map(|g| (g.0 * l).to_integer()).collect();
    let mut coeffs = alloc::vec![0i64; gens.len()];
    let mut acc = 0i64;
    for (i, &n) in ints.iter().enumerate() {
        if n == 0 {
            continue;
        }
        if acc == 0 {
            acc = n.abs();
            coeffs[i] = n.signum();
            continue;
        }
        let eg = acc.extended_gcd(&n);
        for c in coeffs.iter_mut().take(i) {
            *c *= eg.x;
        }
        coeffs[i] = eg.y;
        acc = eg.gcd;
    }
    let generator = HElement(Rational::new(acc, l));
    (FgSubgroup { generator }, coeffs)
}

/// Subgroup of `Q` of the form `scale·H_spec`, or the trivial subgroup.
///
/// Covers every support that occurs: `H_a` itself, `{m/q^k}`, its multiples
/// `p·H`, and cyclic groups `g·Z` (spec of height 0 everywhere).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RationalSubgroup {
    Trivial,
    Scaled { scale: Rational, heights: SupernaturalSpec },
}

impl RationalSubgroup {
    pub fn scaled(scale: Rational, heights: SupernaturalSpec) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::InvalidParams("zero scale".into()));
        }
        Ok(Self::Scaled { scale: scale.abs(), heights })
    }

    /// All of `Q`.
    pub fn everything() -> Self {
        Self::Scaled { scale: Rational::one(), heights: SupernaturalSpec::rationals() }
    }

    /// `g·Z`.
    pub fn cyclic(g: HElement) -> Self {
        if g.is_zero() {
            Self::Trivial
        } else {
            Self::Scaled { scale: g.0.abs(), heights: SupernaturalSpec::uniform(Height::Finite(0)) }
        }
    }

    pub fn contains(&self, y: &HElement) -> bool {
        match self {
            Self::Trivial => y.is_zero(),
            Self::Scaled { scale, heights } => heights.contains(&HElement(y.0 / *scale)),
        }
    }

    /// `k·self`, `k != 0`.
    pub fn multiple(&self, k: i64) -> Self {
        match self {
            Self::Trivial => Self::Trivial,
            Self::Scaled { scale, heights } => Self::Scaled {
                scale: *scale * Rational::from_integer(k.abs()),
                heights: heights.clone(),
            },
        }
    }
}

impl From<FgSubgroup> for RationalSubgroup {
    fn from(g: FgSubgroup) -> Self {
        Self::cyclic(g.generator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i64, d: i64) -> HElement {
        HElement::new(n, d)
    }

    #[test]
    fn membership_examples() {
        let s = SupernaturalSpec::squarefree();
        assert!(s.contains(&h(1, 6)));
        assert!(!s.contains(&h(1, 4)));
        assert!(s.contains(&h(5, 1)));
        assert!(SupernaturalSpec::uniform(Height::Finite(0)).contains(&h(-12, 1)));
    }

    #[test]
    fn canonical_form_drops_redundant_exceptions() {
        let s = SupernaturalSpec::new(Height::Finite(1), [(3, Height::Finite(1)), (2, Height::Infinite)]).unwrap();
        assert_eq!(s.exceptions().len(), 1);
        assert_eq!(s.height(3), Height::Finite(1));
        assert!(SupernaturalSpec::new(Height::Finite(1), [(4, Height::Infinite)]).is_err());
    }

    #[test]
    fn halving_examples() {
        let s = SupernaturalSpec::squarefree();
        assert_eq!(s.halve(&h(3, 1)).unwrap(), h(3, 2));
        assert_eq!(s.halve(&h(1, 2)), Err(Error::NotDivisible(h(1, 2))));
        let two = SupernaturalSpec::p_power(2).unwrap();
        assert_eq!(two.halve(&h(1, 2)).unwrap(), h(1, 4));
        assert_eq!(s.halve(&h(1, 4)), Err(Error::NotMember(h(1, 4))));
    }

    #[test]
    fn coset_examples() {
        let s = SupernaturalSpec::squarefree();
        // 1/3 = 2·(1/6) and 1/6 ∈ H_a
        assert!(s.coset_mod_2k(&h(1, 3), 1).unwrap().in_subgroup());
        assert!(!s.coset_mod_2k(&h(1, 2), 1).unwrap().in_subgroup());
        assert!(s.coset_mod_2k(&h(0, 1), 2).unwrap().in_subgroup());
        assert_eq!(s.coset_mod_2k(&h(1, 4), 1), Err(Error::NotMember(h(1, 4))));
        let full = SupernaturalSpec::rationals();
        assert_eq!(full.coset_mod_2k(&h(1, 2), 2).unwrap(), CosetLabel { modulus: 1, residue: 0 });
    }

    #[test]
    fn coset_label_agrees_with_iterated_halving() {
        let specs = [
            SupernaturalSpec::squarefree(),
            SupernaturalSpec::uniform(Height::Finite(0)),
            SupernaturalSpec::new(Height::Finite(1), [(2, Height::Finite(3))]).unwrap(),
            SupernaturalSpec::p_power(5).unwrap(),
        ];
        for s in &specs {
            for d in [1i64, 2, 3, 5, 6, 8, 10, 15, 30] {
                for n in -20..=20 {
                    let y = h(n, d);
                    if !s.contains(&y) {
                        continue;
                    }
                    for k in 1..=3u32 {
                        let mut t = Ok(y);
                        for _ in 0..k {
                            t = t.and_then(|v| s.halve(&v));
                        }
                        let label = s.coset_mod_2k(&y, k).unwrap();
                        assert_eq!(label.in_subgroup(), t.is_ok(), "{y} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn automorphism_examples() {
        assert!(SupernaturalSpec::rationals().is_automorphism(&Multiplier::integer(7)));
        assert!(!SupernaturalSpec::squarefree().is_automorphism(&Multiplier::integer(2)));
        assert!(SupernaturalSpec::squarefree().is_automorphism(&Multiplier::integer(-1)));
        let two = SupernaturalSpec::p_power(2).unwrap();
        assert!(two.is_automorphism(&Multiplier::new(Rational::new(-1, 4)).unwrap()));
        assert!(!two.is_automorphism(&Multiplier::integer(6)));
    }

    #[test]
    fn classification_examples() {
        let c = SupernaturalSpec::squarefree().classify();
        assert_eq!(c.case.number(), 1);
        assert_eq!(c.witness_prime, None);
        assert_eq!(c.smallest_non_aut_prime, Some(2));

        let c = SupernaturalSpec::p_power(2).unwrap().classify();
        assert_eq!((c.case.number(), c.witness_prime, c.smallest_non_aut_prime), (2, Some(2), Some(3)));

        let c = SupernaturalSpec::rationals().classify();
        assert_eq!((c.case.number(), c.witness_prime, c.smallest_non_aut_prime), (2, Some(2), None));

        let s = SupernaturalSpec::new(Height::Infinite, [(2, Height::Finite(1)), (3, Height::Finite(0))]).unwrap();
        let c = s.classify();
        assert_eq!((c.witness_prime, c.smallest_non_aut_prime), (Some(5), Some(2)));
    }

    #[test]
    fn fg_generator_examples() {
        assert_eq!(fg_generator(&[h(1, 2), h(1, 3)]).generator, h(1, 6));
        assert_eq!(fg_generator(&[h(5, 1)]).generator, h(5, 1));
        assert_eq!(fg_generator(&[h(0, 1), h(0, 1)]).generator, h(0, 1));
        assert_eq!(fg_generator(&[h(-4, 3), h(2, 5)]).generator, h(2, 15));
    }

    #[test]
    fn subgroup_descriptors() {
        let h3 = RationalSubgroup::scaled(Rational::one(), SupernaturalSpec::p_power(3).unwrap()).unwrap();
        assert!(h3.contains(&h(5, 3)));
        assert!(!h3.contains(&h(1, 2)));
        let h3p = h3.multiple(5);
        assert!(h3p.contains(&h(5, 3)));
        assert!(!h3p.contains(&h(1, 3)));
        assert!(RationalSubgroup::Trivial.contains(&HElement::zero()));
        assert!(RationalSubgroup::cyclic(h(1, 6)).contains(&h(-5, 6)));
        assert!(!RationalSubgroup::cyclic(h(1, 6)).contains(&h(1, 12)));
    }
}
