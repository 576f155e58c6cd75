//! JSON forms of the core types.
//!
//! Rationals travel as `"n/d"` strings (plain integers are accepted on
//! input), heights as a nonnegative integer or `"inf"`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use sdlab_core::constructions::{ClassExclusion, ConstructionManifest, Expected, Obstruction};
use sdlab_core::finite::{Dist, FiniteGroup};
use sdlab_core::{
    CharFn, FormsMatrix, HElement, Height, Multiplier, PhaseChar, Rational, RationalSubgroup, Residual,
    SupernaturalSpec, TestBox, Value, VerifyReport,
};

use crate::error::{CliError, Result};

/// A rational in its string form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q(pub Rational);

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for Q {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let r: Rational = s.trim().parse().map_err(|_| CliError::Config(format!("not a rational: {s:?}")))?;
        Ok(Q(r))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Q(Rational::from_integer(n))),
            Raw::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

impl From<HElement> for Q {
    fn from(y: HElement) -> Self {
        Q(y.0)
    }
}

impl From<Q> for HElement {
    fn from(q: Q) -> Self {
        HElement(q.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeightJson(pub Height);

impl Serialize for HeightJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Height::Finite(h) => s.serialize_u32(h),
            Height::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for HeightJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(h) => Ok(HeightJson(Height::Finite(h))),
            Raw::Str(s) if s == "inf" => Ok(HeightJson(Height::Infinite)),
            Raw::Str(s) => Err(de::Error::custom(format!("height must be an integer or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub default: HeightJson,
    #[serde(default, deserialize_with = "prime_keys")]
    pub exceptions: BTreeMap<u64, HeightJson>,
}

// Integer map keys do not survive the buffering of untagged enums, so the
// keys are read as strings.
fn prime_keys<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u64, HeightJson>, D::Error> {
    BTreeMap::<String, HeightJson>::deserialize(d)?
        .into_iter()
        .map(|(k, h)| k.trim().parse().map(|p| (p, h)).map_err(|_| de::Error::custom(format!("bad prime key {k:?}"))))
        .collect()
}

impl SpecJson {
    pub fn from_core(spec: &SupernaturalSpec) -> Self {
        SpecJson {
            default: HeightJson(spec.default_height()),
            exceptions: spec.exceptions().iter().map(|(p, h)| (*p, HeightJson(*h))).collect(),
        }
    }

    pub fn to_core(&self) -> Result<SupernaturalSpec> {
        Ok(SupernaturalSpec::new(self.default.0, self.exceptions.iter().map(|(p, h)| (*p, h.0)))?)
    }
}

/// `"n/d"`, `{"modulus", "angle"}` (angle in turns) or `{"re", "im"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueJson {
    Rational(Q),
    Polar {
        #[serde(default = "one")]
        modulus: Q,
        angle: Q,
    },
    Approx {
        re: f64,
        im: f64,
    },
}

fn one() -> Q {
    Q(Rational::from_integer(1))
}

impl ValueJson {
    pub fn from_core(v: &Value) -> Self {
        match *v {
            Value::Rational(r) => ValueJson::Rational(Q(r)),
            Value::Phase { modulus, turn } => ValueJson::Polar { modulus: Q(modulus), angle: Q(turn) },
            Value::Approx(z) => ValueJson::Approx { re: z.re, im: z.im },
        }
    }

    pub fn to_core(&self) -> Value {
        match *self {
            ValueJson::Rational(q) => Value::Rational(q.0),
            ValueJson::Polar { modulus, angle } => Value::polar(modulus.0, angle.0),
            ValueJson::Approx { re, im } => Value::Approx(sdlab_core::value::Complex64::new(re, im)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseJson {
    pub generator: Q,
    pub angle_per_unit: Q,
}

impl PhaseJson {
    fn from_core(p: &PhaseChar) -> Self {
        PhaseJson { generator: p.generator.into(), angle_per_unit: Q(p.angle_per_unit) }
    }

    fn to_core(&self) -> Result<PhaseChar> {
        Ok(PhaseChar::new(self.generator.into(), self.angle_per_unit.0)?)
    }
}

/// `"trivial"` or `{"scale", "heights"}` for `scale·H_heights`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupJson {
    Named(String),
    Scaled { scale: Q, heights: SpecJson },
}

impl SubgroupJson {
    fn from_core(s: &RationalSubgroup) -> Self {
        match s {
            RationalSubgroup::Trivial => SubgroupJson::Named("trivial".into()),
            RationalSubgroup::Scaled { scale, heights } => {
                SubgroupJson::Scaled { scale: Q(*scale), heights: SpecJson::from_core(heights) }
            }
        }
    }

    fn to_core(&self) -> Result<RationalSubgroup> {
        match self {
            SubgroupJson::Named(s) if s == "trivial" => Ok(RationalSubgroup::Trivial),
            SubgroupJson::Named(s) => Err(CliError::Config(format!("unknown subgroup {s:?}"))),
            SubgroupJson::Scaled { scale, heights } => Ok(RationalSubgroup::scaled(scale.0, heights.to_core()?)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub point: Q,
    pub value: ValueJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CharFnJson {
    Idempotent { support: SubgroupJson, phase: PhaseJson },
    TwoLevel { outer: SubgroupJson, inner_prime: u64, level: Q },
    FiniteSupport { entries: Vec<EntryJson> },
    Gaussian { sigma: f64, phase: PhaseJson },
    ModulusSquare { of: Box<CharFnJson> },
    Product { factors: Vec<CharFnJson> },
}

impl CharFnJson {
    pub fn from_core(f: &CharFn) -> Self {
        match f {
            CharFn::Idempotent { support, phase } => CharFnJson::Idempotent {
                support: SubgroupJson::from_core(support),
                phase: PhaseJson::from_core(phase),
            },
            CharFn::TwoLevel { outer, inner_prime, level } => CharFnJson::TwoLevel {
                outer: SubgroupJson::from_core(outer),
                inner_prime: *inner_prime,
                level: Q(*level),
            },
            CharFn::FiniteSupport { entries } => CharFnJson::FiniteSupport {
                entries: entries.iter().map(|(y, v)| EntryJson { point: (*y).into(), value: ValueJson::from_core(v) }).collect(),
            },
            CharFn::Gaussian { sigma, phase } => CharFnJson::Gaussian { sigma: *sigma, phase: PhaseJson::from_core(phase) },
            CharFn::ModulusSquare(inner) => CharFnJson::ModulusSquare { of: Box::new(Self::from_core(inner)) },
            CharFn::Product(fs) => CharFnJson::Product { factors: fs.iter().map(Self::from_core).collect() },
        }
    }

    /// Finite-support tables are taken as given, without the Hermitian and
    /// bound checks, so that a hand-edited manifest is verified rather than
    /// rejected.
    pub fn to_core(&self) -> Result<CharFn> {
        Ok(match self {
            CharFnJson::Idempotent { support, phase } => CharFn::idempotent(support.to_core()?, phase.to_core()?),
            CharFnJson::TwoLevel { outer, inner_prime, level } => CharFn::two_level(outer.to_core()?, *inner_prime, level.0)?,
            CharFnJson::FiniteSupport { entries } => {
                let mut table = BTreeMap::new();
                for e in entries {
                    if table.insert(HElement::from(e.point), e.value.to_core()).is_some() {
                        return Err(CliError::Config(format!("point {} listed twice", e.point)));
                    }
                }
                CharFn::finite_support_unchecked(table)
            }
            CharFnJson::Gaussian { sigma, phase } => CharFn::gaussian(*sigma, phase.to_core()?)?,
            CharFnJson::ModulusSquare { of } => CharFn::ModulusSquare(Box::new(of.to_core()?)),
            CharFnJson::Product { factors } => CharFn::Product(factors.iter().map(Self::to_core).collect::<Result<_>>()?),
        })
    }
}

pub fn forms_to_json(forms: &FormsMatrix) -> Vec<Vec<Q>> {
    forms.rows().iter().map(|row| row.iter().map(|m| Q(m.ratio())).collect()).collect()
}

pub fn forms_from_json(rows: &[Vec<Q>]) -> Result<FormsMatrix> {
    let rows = rows
        .iter()
        .map(|row| row.iter().map(|q| Multiplier::new(q.0)).collect::<sdlab_core::Result<Vec<_>>>())
        .collect::<sdlab_core::Result<Vec<_>>>()?;
    Ok(FormsMatrix::new(rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxJson {
    pub generators: Vec<Q>,
    pub bound: u32,
}

impl BoxJson {
    pub fn from_core(b: &TestBox) -> Self {
        BoxJson { generators: b.generators.iter().map(|&y| y.into()).collect(), bound: b.bound }
    }

    pub fn to_core(&self) -> Result<TestBox> {
        Ok(TestBox::new(self.generators.iter().map(|&q| q.into()).collect(), self.bound)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionJson {
    NotIdempotent,
    NotGaussIdempotent,
}

impl From<ClassExclusion> for ExclusionJson {
    fn from(c: ClassExclusion) -> Self {
        match c {
            ClassExclusion::NotIdempotent => ExclusionJson::NotIdempotent,
            ClassExclusion::NotGaussIdempotent => ExclusionJson::NotGaussIdempotent,
        }
    }
}

impl From<ExclusionJson> for ClassExclusion {
    fn from(c: ExclusionJson) -> Self {
        match c {
            ExclusionJson::NotIdempotent => ClassExclusion::NotIdempotent,
            ExclusionJson::NotGaussIdempotent => ClassExclusion::NotGaussIdempotent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedJson {
    pub equation_holds: bool,
    #[serde(default)]
    pub class_exclusions: Vec<ExclusionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructionJson {
    pub divisor: u64,
    pub witness: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestJson {
    pub name: String,
    pub spec: SpecJson,
    pub fs: Vec<CharFnJson>,
    pub forms: Vec<Vec<Q>>,
    #[serde(rename = "box")]
    pub recommended_box: BoxJson,
    pub expected: ExpectedJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionJson>,
}

impl ManifestJson {
    pub fn from_core(m: &ConstructionManifest) -> Self {
        ManifestJson {
            name: m.name.clone(),
            spec: SpecJson::from_core(&m.spec),
            fs: m.fs.iter().map(CharFnJson::from_core).collect(),
            forms: forms_to_json(&m.forms),
            recommended_box: BoxJson::from_core(&m.recommended_box),
            expected: ExpectedJson {
                equation_holds: m.expected.equation_holds,
                class_exclusions: m.expected.class_exclusions.iter().map(|&c| c.into()).collect(),
            },
            obstruction: m.obstruction.as_ref().map(|o| ObstructionJson { divisor: o.divisor, witness: o.witness.map(Q::from) }),
        }
    }

    pub fn to_core(&self) -> Result<ConstructionManifest> {
        let m = ConstructionManifest {
            name: self.name.clone(),
            spec: self.spec.to_core()?,
            fs: self.fs.iter().map(CharFnJson::to_core).collect::<Result<_>>()?,
            forms: forms_from_json(&self.forms)?,
            recommended_box: self.recommended_box.to_core()?,
            expected: Expected {
                equation_holds: self.expected.equation_holds,
                class_exclusions: self.expected.class_exclusions.iter().map(|&c| c.into()).collect(),
            },
            obstruction: self.obstruction.as_ref().map(|o| Obstruction { divisor: o.divisor, witness: o.witness.map(HElement::from) }),
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub point: Vec<Q>,
    pub lhs: ValueJson,
    pub rhs: ValueJson,
}

impl ResidualJson {
    pub fn from_core(r: &Residual) -> Self {
        ResidualJson {
            point: r.point.iter().map(|&y| y.into()).collect(),
            lhs: ValueJson::from_core(&r.lhs),
            rhs: ValueJson::from_core(&r.rhs),
        }
    }
}

/// A float, or `"0(exact)"` when every comparison was exact and none failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WorstJson {
    Float(f64),
    Tag(String),
}

pub const EXACT_ZERO: &str = "0(exact)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub points: u64,
    pub violation_count: u64,
    pub violations: Vec<ResidualJson>,
    pub worst_residual: WorstJson,
    pub exact: bool,
}

impl ReportJson {
    pub fn from_core(r: &VerifyReport) -> Self {
        let worst_residual = if r.exact && r.worst_residual.is_zero() {
            WorstJson::Tag(EXACT_ZERO.into())
        } else {
            WorstJson::Float(r.worst_residual)
        };
        ReportJson {
            points: r.points,
            violation_count: r.violation_count,
            violations: r.violations.iter().map(ResidualJson::from_core).collect(),
            worst_residual,
            exact: r.exact,
        }
    }
}

/// Group spec `"m1,m2,..."`.
pub fn parse_group(s: &str) -> Result<FiniteGroup> {
    let moduli = s
        .split(',')
        .map(|m| m.trim().parse::<u64>().map_err(|_| CliError::Config(format!("bad group modulus {m:?} in {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteGroup::new(moduli)?)
}

pub fn group_to_string(g: &FiniteGroup) -> String {
    g.moduli().iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// `{"probs": {"(x1,x2)": "p/q"}}`, support only, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistJson {
    pub probs: Vec<(String, Q)>,
}

fn element_key(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn parse_element_key(g: &FiniteGroup, key: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Config(format!("bad element key {key:?}"));
    let inner = key.trim().strip_prefix('(').and_then(|k| k.strip_suffix(')')).ok_or_else(bad)?;
    let coords = inner.split(',').map(|c| c.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
    if coords.len() != g.rank() {
        return Err(bad());
    }
    Ok(g.reduce(&coords)?)
}

impl DistJson {
    pub fn from_core(g: &FiniteGroup, d: &Dist) -> Self {
        DistJson { probs: d.support().into_iter().map(|i| (element_key(&g.element(i)), Q(d.prob(i)))).collect() }
    }

    pub fn to_core(&self, g: &FiniteGroup) -> Result<Dist> {
        let probs = self.probs.iter().map(|(k, p)| Ok((parse_element_key(g, k)?, p.0))).collect::<Result<Vec<_>>>()?;
        Ok(Dist::from_probs(g, probs)?)
    }
}

impl Serialize for DistJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Probs<'a>(&'a [(String, Q)]);
        impl Serialize for Probs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("probs", &Probs(&self.probs))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for DistJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            probs: BTreeMap<String, Q>,
        }
        let raw = Raw::deserialize(d)?;
        Ok(DistJson { probs: raw.probs.into_iter().collect() })
    }
}
