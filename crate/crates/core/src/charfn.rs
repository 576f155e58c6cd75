//! Finitely described characteristic functions on subgroups of `Q`.
//!
//! Every variant is a closed form; nothing here integrates. Values stay exact
//! (see [`Value`]) except where a Gaussian factor enters.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::arith::{self, frac, Rational};
use crate::boxes::TestBox;
use crate::error::{Error, Result};
use crate::solenoid::{HElement, RationalSubgroup, SupernaturalSpec};
use crate::value::Value;

/// Comparison tolerance for the floating path.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A character of the cyclic group `generator·Z`, given by the turn it
/// assigns to the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseChar {
    pub generator: HElement,
    /// Turn of `generator`, in `[0, 1)`.
    pub angle_per_unit: Rational,
}

impl PhaseChar {
    pub fn new(generator: HElement, angle_per_unit: Rational) -> Result<Self> {
        if generator.is_zero() {
            return Err(Error::InvalidParams("phase generator must be nonzero".into()));
        }
        Ok(Self { generator: generator.abs(), angle_per_unit: frac(angle_per_unit * sign(generator)) })
    }

    pub fn trivial() -> Self {
        Self { generator: HElement::integer(1), angle_per_unit: Rational::zero() }
    }

    pub fn is_trivial(&self) -> bool {
        self.angle_per_unit.is_zero()
    }

    /// Turn at `y = k·generator`. The trivial character is defined everywhere.
    pub fn turn(&self, y: &HElement) -> Result<Rational> {
        if self.is_trivial() {
            return Ok(Rational::zero());
        }
        let k = y.multiple_of(&self.generator).ok_or(Error::Domain(*y))?;
        Ok(frac(self.angle_per_unit * k))
    }

    /// Pointwise product of two characters on the same cyclic group.
    pub fn combine(&self, other: &PhaseChar) -> Option<PhaseChar> {
        if self.is_trivial() {
            return Some(*other);
        }
        if other.is_trivial() {
            return Some(*self);
        }
        (self.generator == other.generator).then(|| PhaseChar {
            generator: self.generator,
            angle_per_unit: frac(self.angle_per_unit + other.angle_per_unit),
        })
    }
}

fn sign(g: HElement) -> i64 {
    if g.0 < Rational::zero() {
        -1
    } else {
        1
    }
}

/// Where a characteristic function may be evaluated: inside `H_a`, and, when
/// a designated generator is present, inside the cyclic group it generates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalContext {
    pub spec: SupernaturalSpec,
    pub generator: Option<HElement>,
}

impl EvalContext {
    pub fn new(spec: SupernaturalSpec) -> Self {
        Self { spec, generator: None }
    }

    pub fn with_generator(spec: SupernaturalSpec, generator: HElement) -> Self {
        Self { spec, generator: Some(generator) }
    }

    pub fn check(&self, y: &HElement) -> Result<()> {
        if !self.spec.contains(y) {
            return Err(Error::Domain(*y));
        }
        if let Some(g) = &self.generator {
            if !y.is_zero() && y.multiple_of(g).is_none() {
                return Err(Error::Domain(*y));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CharFn {
    /// Characteristic function of `m_K ∗ E_x`: `(x, y)` on the annihilator
    /// `support = A(Y, K)`, zero elsewhere.
    Idempotent { support: RationalSubgroup, phase: PhaseChar },
    /// `1` on `p·H`, `level` on `H ∖ p·H`, `0` off `H`.
    TwoLevel { outer: RationalSubgroup, inner_prime: u64, level: Rational },
    /// Listed values, implicit `1` at `0`, zero elsewhere.
    FiniteSupport { entries: BTreeMap<HElement, Value> },
    /// `(x, y)·exp(-σ y²)`.
    Gaussian { sigma: f64, phase: PhaseChar },
    /// `|f|²`, the characteristic function of `μ ∗ μ̄`.
    ModulusSquare(Box<CharFn>),
    /// Pointwise product, i.e. convolution of the distributions.
    Product(Vec<CharFn>),
}

impl CharFn {
    /// Constant one: the degenerate distribution at 0.
    pub fn one() -> Self {
        CharFn::Idempotent { support: RationalSubgroup::everything(), phase: PhaseChar::trivial() }
    }

    /// Indicator of `{0}`: the Haar distribution of the whole group.
    pub fn haar() -> Self {
        CharFn::Idempotent { support: RationalSubgroup::Trivial, phase: PhaseChar::trivial() }
    }

    /// A character `y ↦ (x, y)` of the cyclic group of `phase`.
    pub fn character(phase: PhaseChar) -> Self {
        CharFn::Idempotent { support: RationalSubgroup::everything(), phase }
    }

    pub fn idempotent(support: RationalSubgroup, phase: PhaseChar) -> Self {
        CharFn::Idempotent { support, phase }
    }

    pub fn two_level(outer: RationalSubgroup, inner_prime: u64, level: Rational) -> Result<Self> {
        if !(Rational::zero() < level && level < Rational::one()) {
            return Err(Error::InvalidParams(format!("level {level} outside (0, 1)")));
        }
        if !arith::is_prime(inner_prime) {
            return Err(Error::InvalidParams(format!("{inner_prime} is not prime")));
        }
        if outer == RationalSubgroup::Trivial {
            return Err(Error::InvalidParams("two-level function on the trivial subgroup".into()));
        }
        Ok(Self::two_level_unchecked(outer, inner_prime, level))
    }

    /// No range check on `level`; for exercising the positivity checker.
    pub fn two_level_unchecked(outer: RationalSubgroup, inner_prime: u64, level: Rational) -> Self {
        CharFn::TwoLevel { outer, inner_prime, level }
    }

    /// Validates Hermitian symmetry, `|value| <= 1` and the value at 0.
    pub fn finite_support(entries: impl IntoIterator<Item = (HElement, Value)>) -> Result<Self> {
        let f = Self::finite_support_unchecked(entries);
        let CharFn::FiniteSupport { entries } = &f else { unreachable!() };
        for (y, v) in entries {
            if v.modulus() > 1.0 + DEFAULT_TOLERANCE {
                return Err(Error::InvalidParams(format!("value at {y} exceeds 1 in modulus")));
            }
            let mirror = entries.get(&-*y).copied().unwrap_or(Value::zero());
            if !mirror.approx_eq(&v.conj(), DEFAULT_TOLERANCE) {
                return Err(Error::InvalidParams(format!("values at ±{y} are not conjugate")));
            }
        }
        Ok(f)
    }

    /// Zero entries are dropped; an entry at 0 overrides the implicit 1.
    pub fn finite_support_unchecked(entries: impl IntoIterator<Item = (HElement, Value)>) -> Self {
        let entries = entries
            .into_iter()
            .filter(|(y, v)| if y.is_zero() { !v.is_one() } else { !v.is_zero() })
            .collect();
        CharFn::FiniteSupport { entries }
    }

    pub fn gaussian(sigma: f64, phase: PhaseChar) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParams(format!("sigma {sigma} must be finite and nonnegative")));
        }
        Ok(CharFn::Gaussian { sigma, phase })
    }

    /// Evaluation with the domain checks of `ctx`.
    pub fn eval(&self, y: &HElement, ctx: &EvalContext) -> Result<Value> {
        ctx.check(y)?;
        self.eval_at(y)
    }

    /// Closed-form value at `y`, without the `H_a` membership check.
    pub fn eval_at(&self, y: &HElement) -> Result<Value> {
        Ok(match self {
            CharFn::Idempotent { support, phase } => {
                if support.contains(y) {
                    Value::unit(phase.turn(y)?)
                } else {
                    Value::zero()
                }
            }
            CharFn::TwoLevel { outer, inner_prime, level } => {
                if !outer.contains(y) {
                    Value::zero()
                } else if outer.contains(&HElement(y.0 / *inner_prime as i64)) {
                    Value::one()
                } else {
                    Value::Rational(*level)
                }
            }
            CharFn::FiniteSupport { entries } => match entries.get(y) {
                Some(v) => *v,
                None if y.is_zero() => Value::one(),
                None => Value::zero(),
            },
            CharFn::Gaussian { sigma, phase } => {
                let ph = Value::unit(phase.turn(y)?);
                if *sigma == 0.0 || y.is_zero() {
                    ph
                } else {
                    let t = y.to_f64();
                    Value::Approx(ph.to_complex() * libm::exp(-sigma * t * t))
                }
            }
            CharFn::ModulusSquare(base) => base.eval_at(y)?.norm_sqr(),
            CharFn::Product(fs) => {
                let mut acc = Value::one();
                for f in fs {
                    acc = acc * f.eval_at(y)?;
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
        })
    }

    /// `|f|²` in closed form where one exists.
    pub fn modulus_square(&self) -> CharFn {
        match self {
            CharFn::Idempotent { support, .. } => {
                CharFn::Idempotent { support: support.clone(), phase: PhaseChar::trivial() }
            }
            CharFn::TwoLevel { outer, inner_prime, level } => CharFn::TwoLevel {
                outer: outer.clone(),
                inner_prime: *inner_prime,
                level: *level * *level,
            },
            CharFn::FiniteSupport { entries } => CharFn::FiniteSupport {
                entries: entries.iter().map(|(y, v)| (*y, v.norm_sqr())).collect(),
            },
            CharFn::Gaussian { sigma, .. } => CharFn::Gaussian { sigma: 2.0 * sigma, phase: PhaseChar::trivial() },
            CharFn::Product(fs) => CharFn::Product(fs.iter().map(CharFn::modulus_square).collect()),
            CharFn::ModulusSquare(_) => CharFn::ModulusSquare(Box::new(self.clone())),
        }
    }

    /// `{y ∈ box : f(y) = 1}`, checked to be a subgroup at box scale on
    /// which `f` is invariant.
    pub fn invariance_subgroup(&self, tbox: &TestBox) -> Result<Vec<HElement>> {
        let pts = tbox.points()?;
        let vals = self.values_on(&pts)?;
        let lookup: BTreeMap<HElement, Value> = pts.iter().copied().zip(vals.iter().copied()).collect();
        let set: Vec<HElement> = pts
            .iter()
            .zip(&vals)
            .filter(|(_, v)| v.approx_eq(&Value::one(), DEFAULT_TOLERANCE))
            .map(|(y, _)| *y)
            .collect();
        let in_set = |y: &HElement| set.binary_search(y).is_ok();
        for a in &set {
            if !in_set(&-*a) {
                return Err(Error::ClosureViolation(format!("{a} present but not its negative")));
            }
            for b in &set {
                let s = *a + *b;
                if lookup.contains_key(&s) && !in_set(&s) {
                    return Err(Error::ClosureViolation(format!("{a} + {b} missing")));
                }
            }
        }
        for h in &set {
            for (y, v) in &lookup {
                if let Some(w) = lookup.get(&(*y + *h)) {
                    if !w.approx_eq(v, DEFAULT_TOLERANCE) {
                        return Err(Error::ClosureViolation(format!("not invariant under {h} at {y}")));
                    }
                }
            }
        }
        Ok(set)
    }

    /// Herglotz test of the restriction `k ↦ f(k·generator)`: every DFT
    /// coefficient of one period must be real and `>= -tolerance`.
    pub fn pd_check_cyclic(&self, generator: &HElement, period: u64, tolerance: f64) -> Result<bool> {
        if period == 0 || generator.is_zero() {
            return Err(Error::InvalidParams("period and generator must be nonzero".into()));
        }
        let p = period as i64;
        let at = |k: i64| self.eval_at(&(*generator * k));
        let one_period: Vec<Value> = (0..p).map(at).collect::<Result<_>>()?;
        for k in -p..2 * p {
            let base = one_period[k.rem_euclid(p) as usize];
            if !at(k)?.approx_eq(&base, DEFAULT_TOLERANCE) {
                return Err(Error::NotPeriodic { period });
            }
        }
        let samples: Vec<Complex64> = one_period.iter().map(Value::to_complex).collect();
        let imag_tol = tolerance.max(DEFAULT_TOLERANCE);
        Ok(dft(&samples).iter().all(|z| z.re >= -tolerance && z.im.abs() <= imag_tol))
    }

    /// Whether `f` looks like the characteristic function of a shifted Haar
    /// distribution on the box: modulus in `{0, 1}`, the modulus-one set
    /// closed under `±`, and multiplicative there.
    pub fn is_idempotent_on_box(&self, tbox: &TestBox) -> Result<bool> {
        let pts = tbox.points()?;
        let vals = self.values_on(&pts)?;
        let lookup: BTreeMap<HElement, Value> = pts.iter().copied().zip(vals.iter().copied()).collect();
        let mut unit_set = Vec::new();
        for (y, v) in pts.iter().zip(&vals) {
            let m = modulus_class(v);
            match m {
                Some(true) => unit_set.push(*y),
                Some(false) => {}
                None => return Ok(false),
            }
        }
        for a in &unit_set {
            for b in &unit_set {
                let s = *a + *b;
                let Some(vs) = lookup.get(&s) else { continue };
                let prod = lookup[a] * lookup[b];
                if !vs.approx_eq(&prod, DEFAULT_TOLERANCE) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Certificate against `f ∈ Γ(X) ∗ I(X)` on a box: `false` means the box
    /// already rules membership out. The support must be a subgroup at box
    /// scale and `|f(y)| = exp(-σ y²)` on it, `σ` fitted from the support
    /// point of smallest absolute value.
    pub fn is_gauss_idem_modulus_on_box(&self, tbox: &TestBox, tolerance: f64) -> Result<bool> {
        let pts = tbox.points()?;
        let vals = self.values_on(&pts)?;
        let support: Vec<(HElement, f64)> = pts
            .iter()
            .zip(&vals)
            .filter(|(_, v)| !v.is_zero() && v.modulus() > tolerance)
            .map(|(y, v)| (*y, v.modulus()))
            .collect();
        let in_support = |y: &HElement| support.binary_search_by(|(s, _)| s.cmp(y)).is_ok();
        for (a, _) in &support {
            if !in_support(&-*a) {
                return Ok(false);
            }
            for (b, _) in &support {
                let s = *a + *b;
                if pts.binary_search(&s).is_ok() && !in_support(&s) {
                    return Ok(false);
                }
            }
        }
        let mut nonzero: Vec<(HElement, f64)> = support.into_iter().filter(|(y, _)| !y.is_zero()).collect();
        nonzero.sort_by(|(a, _), (b, _)| a.abs().cmp(&b.abs()).then(b.cmp(a)));
        let Some(&(y1, m1)) = nonzero.first() else { return Ok(true) };
        if m1 > 1.0 + tolerance {
            return Ok(false);
        }
        let t1 = y1.to_f64();
        let sigma = -libm::log(m1) / (t1 * t1);
        Ok(nonzero.iter().all(|(y, m)| {
            let t = y.to_f64();
            (m - libm::exp(-sigma * t * t)).abs() <= tolerance
        }))
    }

    fn values_on(&self, pts: &[HElement]) -> Result<Vec<Value>> {
        pts.iter().map(|y| self.eval_at(y)).collect()
    }
}

/// `Some(true)` for modulus one, `Some(false)` for zero, `None` otherwise.
fn modulus_class(v: &Value) -> Option<bool> {
    match v.exact_modulus() {
        Some(m) if m.is_zero() => Some(false),
        Some(m) if m.is_one() => Some(true),
        Some(_) => None,
        None => {
            let m = v.modulus();
            if m <= DEFAULT_TOLERANCE {
                Some(false)
            } else if (m - 1.0).abs() <= DEFAULT_TOLERANCE {
                Some(true)
            } else {
                None
            }
        }
    }
}

/// Normalised DFT `F(j) = (1/n) Σ_k f(k) e^{-2πi jk/n}`.
fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::zero();
            for (k, s) in samples.iter().enumerate() {
                let angle = -2.0 * core::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                acc += s * Complex64::new(libm::cos(angle), libm::sin(angle));
            }
            acc / n as f64
        })
        .collect()
}

/// Characteristic function of the convolution: pointwise product.
///
/// Singletons are returned unchanged, nested products are flattened, and
/// idempotents sharing a support and phase group collapse to one idempotent.
pub fn product(fs: &[CharFn]) -> CharFn {
    match fs {
        [] => CharFn::one(),
        [f] => f.clone(),
        _ => {
            let mut flat = Vec::new();
            for f in fs {
                match f {
                    CharFn::Product(inner) => flat.extend(inner.iter().cloned()),
                    other => flat.push(other.clone()),
                }
            }
            if let Some(merged) = merge_idempotents(&flat) {
                return merged;
            }
            CharFn::Product(flat)
        }
    }
}

fn merge_idempotents(fs: &[CharFn]) -> Option<CharFn> {
    let mut iter = fs.iter();
    let CharFn::Idempotent { support, phase } = iter.next()? else { return None };
    let mut phase = *phase;
    for f in iter {
        match f {
            CharFn::Idempotent { support: s, phase: ph } if s == support => phase = phase.combine(ph)?,
            _ => return None,
        }
    }
    Some(CharFn::Idempotent { support: support.clone(), phase })
}
