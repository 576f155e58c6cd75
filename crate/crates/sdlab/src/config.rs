//! The serialisable description of a run. Every report embeds the config
//! that produced it.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::{BoxJson, DistJson, SpecJson, ValueJson, Q};

/// Overrides the point cap when `--budget` is not given.
pub const BUDGET_ENV: &str = "SD_LAB_BUDGET";
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Build,
    Verify,
    Finite,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    /// `n` two-level functions on `Q` with forms built from `p`, `q`.
    Lemma37,
    /// Three copies of `1` at 0, `1/2` at `±y0`.
    Thm41p2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub kind: ConstructionKind,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Q>,
}

/// Overwrites `fs[function](point)` after the manifest is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tamper {
    pub function: usize,
    pub point: Q,
    pub value: ValueJson,
}

impl std::str::FromStr for Tamper {
    type Err = CliError;

    /// `index:point:value`, e.g. `0:1:3/5`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [i, y, v] = parts.as_slice() else {
            return Err(CliError::Config(format!("tamper must be index:point:value, got {s:?}")));
        };
        let function = i.parse().map_err(|_| CliError::Config(format!("bad function index {i:?}")))?;
        Ok(Tamper { function, point: y.parse()?, value: ValueJson::Rational(v.parse()?) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteMode {
    /// Random instances; independence against the equation.
    Equivalence,
    /// Random non-idempotent triples; independence must fail.
    NonIdempotent,
    /// One instance from given distributions.
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FiniteFormsSpec {
    /// `"three"` for the rows `(1,1,1), (1,-1,1), (1,-1,-1)`.
    Preset(String),
    /// Row-major scalar coefficients.
    Matrix(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteParams {
    pub group: String,
    pub mode: FiniteMode,
    pub n: usize,
    pub seeds: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<FiniteFormsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dists: Option<Vec<DistJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_override: Option<BoxJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tamper: Vec<Tamper>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteParams>,
    pub tolerance: f64,
    pub budget: u64,
    pub seed: u64,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            spec: None,
            construction: None,
            manifest: None,
            box_override: None,
            tamper: Vec::new(),
            finite: None,
            tolerance: sdlab_core::charfn::DEFAULT_TOLERANCE,
            budget: DEFAULT_BUDGET,
            seed: 0,
            format: OutputFormat::Json,
        }
    }
}

/// `--budget` if given, else `SD_LAB_BUDGET`, else the default.
pub fn resolve_budget(flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{BUDGET_ENV}={v:?} is not a count"))),
        None => Ok(DEFAULT_BUDGET),
    }
}
