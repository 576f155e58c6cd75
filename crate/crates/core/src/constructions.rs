//! Explicit instances: distributions outside `Γ(X) ∗ I(X)` whose linear
//! forms are nevertheless independent, and the checks their proofs rely on.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{self, Rational};
use crate::boxes::TestBox;
use crate::charfn::{CharFn, PhaseChar};
use crate::error::{Error, Result};
use crate::solenoid::{HElement, Height, Multiplier, RationalSubgroup, SupernaturalSpec};
use crate::value::Value;
use crate::verifier::FormsMatrix;

/// Class memberships a construction is expected to fail on its box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassExclusion {
    NotIdempotent,
    NotGaussIdempotent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub equation_holds: bool,
    pub class_exclusions: Vec<ClassExclusion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionManifest {
    pub name: String,
    pub spec: SupernaturalSpec,
    pub fs: Vec<CharFn>,
    pub forms: FormsMatrix,
    pub recommended_box: TestBox,
    pub expected: Expected,
    pub obstruction: Option<Obstruction>,
}

impl ConstructionManifest {
    /// Shape and automorphism checks.
    pub fn validate(&self) -> Result<()> {
        if self.fs.len() != self.forms.n() {
            return Err(Error::InvalidParams(format!(
                "{} functions for {} forms",
                self.fs.len(),
                self.forms.n()
            )));
        }
        self.forms.validate(&self.spec)
    }
}

fn require_prime(p: u64, what: &str) -> Result<()> {
    if arith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what} = {p} is not prime")))
    }
}

/// Boxes for the lemma instance, largest first, the first one within the
/// default budget winning. Each has points outside `H` and two support
/// points of different size; the last one exceeds the budget for `n >= 5`.
fn lemma37_box(p: u64, q: u64, s: u64, n: usize) -> Result<TestBox> {
    let inv = |d: u64| HElement::new(1, d as i64);
    let candidates = [
        (vec![inv(q), inv(q * q), inv(p), inv(s)], 1),
        (vec![inv(q), inv(q * q), inv(p)], 1),
    ];
    for (gens, bound) in candidates {
        let b = TestBox::new(gens, bound)?;
        let size = b.points()?.len() as u128;
        if size.checked_pow(n as u32).is_some_and(|t| t <= 1_000_000) {
            return Ok(b);
        }
    }
    TestBox::new(vec![inv(q), inv(p)], 2)
}

/// `n` copies of the two-level function (`1` on `p·H`, `c` on `H ∖ p·H`,
/// `0` off `H = {m/q^k}`) on `Q`, with forms
/// `L_1 = ξ_1 + pξ_2 + … + pξ_n` and
/// `L_j = pξ_1 + p²ξ_2 + … + sξ_j + … + p²ξ_n`, `s = p² + q`.
pub fn build_lemma37_case1(p: u64, q: u64, c: Rational, n: usize) -> Result<ConstructionManifest> {
    require_prime(p, "p")?;
    require_prime(q, "q")?;
    if p == q {
        return Err(Error::InvalidParams("p and q must differ".into()));
    }
    if !(Rational::zero() < c && c < Rational::one()) {
        return Err(Error::InvalidParams(format!("c = {c} outside (0, 1)")));
    }
    if n < 3 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 3")));
    }
    let s = p
        .checked_mul(p)
        .and_then(|pp| pp.checked_add(q))
        .ok_or_else(|| Error::InvalidParams("p² + q overflows".into()))?;
    let (pi, si) = (p as i64, s as i64);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| match (j, i) {
                    (0, 0) => 1,
                    (0, _) | (_, 0) => pi,
                    (j, i) if j == i => si,
                    _ => pi * pi,
                })
                .collect()
        })
        .collect();
    let row_refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    let forms = FormsMatrix::from_integers(&row_refs)?;
    let h = RationalSubgroup::scaled(Rational::one(), SupernaturalSpec::p_power(q)?)?;
    let f = CharFn::two_level(h, p, c)?;
    let manifest = ConstructionManifest {
        name: format!("lemma37-case1 p={p} q={q} c={c} n={n}"),
        spec: SupernaturalSpec::uniform(Height::Infinite),
        fs: vec![f; n],
        forms,
        recommended_box: lemma37_box(p, q, s, n)?,
        expected: Expected {
            equation_holds: true,
            class_exclusions: vec![ClassExclusion::NotIdempotent, ClassExclusion::NotGaussIdempotent],
        },
        obstruction: None,
    };
    manifest.validate()?;
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompGrConditions {
    /// `ker(I - δ̃) = {0}`.
    pub cond_i: bool,
    /// `ỹ ∉ Y^(p)` and `2ỹ ∉ Y^(p)`, `p = 1 - a`.
    pub cond_ii: bool,
    /// `δ̃ỹ ≠ -ỹ`.
    pub cond_iii: bool,
}

impl CompGrConditions {
    pub fn all(&self) -> bool {
        self.cond_i && self.cond_ii && self.cond_iii
    }
}

/// The three conditions on `δ = f_a` (multiplication by the integer `a`)
/// and an element `ỹ` of the torsion-free group `H_a`.
pub fn lemma_compgr_conditions(spec: &SupernaturalSpec, a_mult: &Multiplier, y_tilde: &HElement) -> Result<CompGrConditions> {
    if !spec.contains(y_tilde) {
        return Err(Error::NotMember(*y_tilde));
    }
    let r = a_mult.ratio();
    if !r.is_integer() {
        return Err(Error::InvalidParams(format!("multiplier {r} is not an integer")));
    }
    let a = *r.numer();
    let p = 1 - a;
    Ok(CompGrConditions {
        cond_i: p != 0,
        cond_ii: !spec.is_multiple_of(y_tilde, p) && !spec.is_multiple_of(&(*y_tilde * 2), p),
        cond_iii: !(*y_tilde * (a + 1)).is_zero(),
    })
}

/// The second case of the lemma: `p` the smallest prime of finite height,
/// `a = 1 - p`, and `ỹ = p^(-h_p)`, which lies outside `Y^(p)`.
pub fn lemma37_case2(spec: &SupernaturalSpec) -> Result<(Multiplier, HElement, CompGrConditions)> {
    if !spec.height(2).is_infinite() {
        return Err(Error::PreconditionViolated("multiplication by 2 must be an automorphism".into()));
    }
    let p = spec
        .smallest_non_automorphic_prime()
        .ok_or_else(|| Error::PreconditionViolated("every prime acts as an automorphism".into()))?;
    let Height::Finite(e) = spec.height(p) else { unreachable!() };
    let den = (p as i64)
        .checked_pow(e)
        .ok_or_else(|| Error::InvalidParams(format!("{p}^{e} overflows")))?;
    let y_tilde = HElement::new(1, den);
    let a = Multiplier::integer(1 - p as i64);
    let conds = lemma_compgr_conditions(spec, &a, &y_tilde)?;
    Ok((a, y_tilde, conds))
}

/// Certificate that no nonzero `v ∈ H_a` has `d·v ∈ {0, ±y0, ±2y0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Obstruction {
    /// `p - 1` or `p + 1`, whichever is divisible by 4.
    pub divisor: u64,
    /// A nonzero solution, when one exists.
    pub witness: Option<HElement>,
}

impl Obstruction {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn obstruction_check(spec: &SupernaturalSpec, p: u64, y0: &HElement) -> Result<Obstruction> {
    if p.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("p = {p} must be odd")));
    }
    let divisor = if p % 4 == 1 { p - 1 } else { p + 1 };
    let d = divisor as i64;
    let witness = [1, -1, 2, -2]
        .into_iter()
        .map(|k| HElement(y0.0 * k / d))
        .find(|v| !v.is_zero() && spec.contains(v));
    Ok(Obstruction { divisor, witness })
}

/// Three copies of `1` at 0, `1/2` at `±y0`, `0` elsewhere, with forms
/// `ξ1+ξ2+ξ3, ξ1±pξ2+ξ3, ξ1+ξ2±pξ3` (sign `+` when `p ≡ 1 mod 4`).
pub fn build_thm41_part2(spec: &SupernaturalSpec, p: u64, y0: &HElement) -> Result<ConstructionManifest> {
    require_prime(p, "p")?;
    if p == 2 {
        return Err(Error::InvalidParams("p must be odd".into()));
    }
    if !spec.height(p).is_infinite() {
        return Err(Error::InvalidParams(format!("multiplication by {p} is not an automorphism")));
    }
    if spec.height(2).is_infinite() {
        return Err(Error::InvalidParams("multiplication by 2 must not be an automorphism".into()));
    }
    if y0.is_zero() {
        return Err(Error::InvalidParams("y0 must be nonzero".into()));
    }
    if !spec.contains(y0) {
        return Err(Error::NotMember(*y0));
    }
    if spec.is_multiple_of(y0, 2) {
        return Err(Error::InvalidParams(format!("y0 = {y0} is divisible by 2")));
    }
    let k = if p % 4 == 1 { p as i64 } else { -(p as i64) };
    let forms = FormsMatrix::from_integers(&[&[1, 1, 1], &[1, k, 1], &[1, 1, k]])?;
    let half = Value::Rational(Rational::new(1, 2));
    let mu = CharFn::finite_support([(*y0, half), (-*y0, half)])?;
    let obstruction = obstruction_check(spec, p, y0)?;
    let manifest = ConstructionManifest {
        name: format!("thm41-part2 p={p} y0={y0}"),
        spec: spec.clone(),
        fs: vec![mu; 3],
        forms,
        recommended_box: TestBox::new(vec![*y0, HElement(y0.0 / p as i64)], 3)?,
        expected: Expected {
            equation_holds: true,
            class_exclusions: vec![ClassExclusion::NotIdempotent, ClassExclusion::NotGaussIdempotent],
        },
        obstruction: Some(obstruction),
    };
    manifest.validate()?;
    Ok(manifest)
}

/// Triples satisfying the equation for the forms of
/// [`FormsMatrix::three_forms`] on `H_a` with every height 1, checked on the
/// box over `{1/2, 1/3}` with bound 2.
pub fn three_forms_catalog() -> Vec<(String, Vec<CharFn>)> {
    let spec = SupernaturalSpec::squarefree();
    let phase = |t: i64| PhaseChar::new(HElement::new(1, 6), Rational::new(t, 7)).expect("nonzero generator");
    // every height 1 except h_3 = 0: closed under halving inside H_a
    let odd3 = SupernaturalSpec::new(Height::Finite(1), [(3, Height::Finite(0))]).expect("valid spec");
    let k = RationalSubgroup::scaled(Rational::one(), odd3).expect("nonzero scale");
    let half = Value::Rational(Rational::new(1, 2));
    let mu = |y0: HElement| CharFn::finite_support([(y0, half), (-y0, half)]).expect("hermitian");
    let y0 = HElement::new(1, 2);
    debug_assert!(!spec.is_multiple_of(&y0, 2));
    vec![
        ("haar".into(), vec![CharFn::haar(); 3]),
        ("constant".into(), vec![CharFn::one(); 3]),
        ("characters".into(), vec![CharFn::character(phase(1)), CharFn::character(phase(3)), CharFn::character(phase(5))]),
        ("idempotent-common".into(), vec![CharFn::idempotent(k.clone(), PhaseChar::trivial()); 3]),
        (
            "idempotent-phased".into(),
            vec![CharFn::idempotent(k.clone(), phase(2)), CharFn::idempotent(k.clone(), phase(4)), CharFn::idempotent(k, phase(6))],
        ),
        ("haar-mu-mu".into(), vec![CharFn::haar(), mu(y0), mu(y0)]),
        ("haar-haar-mu".into(), vec![CharFn::haar(), CharFn::haar(), mu(y0)]),
    ]
}

/// The box used with [`three_forms_catalog`].
pub fn three_forms_box() -> TestBox {
    TestBox::new(vec![HElement::new(1, 2), HElement::new(1, 3)], 2).expect("valid box")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i64, d: i64) -> HElement {
        HElement::new(n, d)
    }

    #[test]
    fn two_level_forms_matrix() {
        let m = build_lemma37_case1(2, 3, Rational::new(1, 2), 3).unwrap();
        assert_eq!(m.forms, FormsMatrix::from_integers(&[&[1, 2, 2], &[2, 7, 4], &[2, 4, 7]]).unwrap());
        assert_eq!(m.fs.len(), 3);
        assert!(build_lemma37_case1(3, 3, Rational::new(1, 2), 3).is_err());
        assert!(build_lemma37_case1(2, 3, Rational::new(1, 1), 3).is_err());
        assert!(build_lemma37_case1(2, 3, Rational::new(1, 2), 2).is_err());
        let m5 = build_lemma37_case1(3, 2, Rational::new(1, 4), 5).unwrap();
        assert_eq!(m5.forms.entry(3, 3).ratio(), Rational::from_integer(11));
        assert_eq!(m5.forms.entry(3, 2).ratio(), Rational::from_integer(9));
        assert_eq!(m5.forms.entry(0, 4).ratio(), Rational::from_integer(3));
    }

    #[test]
    fn compgr_examples() {
        let spec = SupernaturalSpec::new(Height::Finite(1), [(2, Height::Infinite)]).unwrap();
        let a = Multiplier::integer(-2);
        // 1 = 3·(1/3) with 1/3 ∈ H_a, so condition (ii) fails for ỹ = 1
        let c = lemma_compgr_conditions(&spec, &a, &h(1, 1)).unwrap();
        assert!(c.cond_i && !c.cond_ii && c.cond_iii);
        assert!(lemma_compgr_conditions(&spec, &a, &h(1, 3)).unwrap().all());
        let c = lemma_compgr_conditions(&spec, &Multiplier::integer(-1), &h(1, 3)).unwrap();
        assert!(!c.cond_iii);
        let c = lemma_compgr_conditions(&spec, &a, &HElement::zero()).unwrap();
        assert!(!c.cond_ii);
        assert_eq!(lemma_compgr_conditions(&spec, &a, &h(1, 9)), Err(Error::NotMember(h(1, 9))));

        let (a, y, c) = lemma37_case2(&spec).unwrap();
        assert_eq!(a, Multiplier::integer(-2));
        assert_eq!(y, h(1, 3));
        assert!(c.all());
    }

    #[test]
    fn obstruction_examples() {
        let spec = SupernaturalSpec::new(Height::Finite(0), [(5, Height::Infinite)]).unwrap();
        assert!(obstruction_check(&spec, 5, &h(1, 1)).unwrap().holds());
        let o = obstruction_check(&spec, 5, &h(2, 1)).unwrap();
        assert_eq!(o.witness, Some(h(1, 1)));
        let spec3 = SupernaturalSpec::new(Height::Finite(0), [(3, Height::Infinite)]).unwrap();
        let o = obstruction_check(&spec3, 3, &h(1, 1)).unwrap();
        assert_eq!(o.divisor, 4);
        assert!(o.holds());
    }

    #[test]
    fn part_two_branches_and_preconditions() {
        let spec5 = SupernaturalSpec::new(Height::Finite(0), [(5, Height::Infinite)]).unwrap();
        let m = build_thm41_part2(&spec5, 5, &h(1, 1)).unwrap();
        assert_eq!(m.forms, FormsMatrix::from_integers(&[&[1, 1, 1], &[1, 5, 1], &[1, 1, 5]]).unwrap());
        let spec3 = SupernaturalSpec::new(Height::Finite(0), [(3, Height::Infinite)]).unwrap();
        let m = build_thm41_part2(&spec3, 3, &h(1, 1)).unwrap();
        assert_eq!(m.forms.entry(1, 1).ratio(), Rational::from_integer(-3));
        assert!(build_thm41_part2(&spec5, 5, &h(2, 1)).is_err());
        assert!(build_thm41_part2(&spec5, 3, &h(1, 1)).is_err());
        assert!(build_thm41_part2(&spec5, 5, &HElement::zero()).is_err());
        let spec2 = SupernaturalSpec::new(Height::Finite(0), [(2, Height::Infinite), (5, Height::Infinite)]).unwrap();
        assert!(build_thm41_part2(&spec2, 5, &h(1, 1)).is_err());
    }
}
