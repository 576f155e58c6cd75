//! The four commands. Each returns a report and whether its expectations
//! were met; errors map to exit code 2.

use serde::Serialize;

use sdlab_core::constructions::ConstructionManifest;
use sdlab_core::finite::{
    equivalence_test, idempotent_classify, random_instance, random_non_idempotent, Dist, FiniteForms, FiniteGroup,
};
use sdlab_core::{
    build_lemma37_case1, build_thm41_part2, derived_identities_check, CharFn, ClassExclusion, FormsMatrix, HElement,
    Height, SolenoidCase, SupernaturalSpec, VerifyConfig,
};

use crate::config::{
    Command, ConstructionKind, FiniteFormsSpec, FiniteMode, FiniteParams, OutputFormat, RunConfig,
};
use crate::error::{CliError, Result};
use crate::format::{group_to_string, parse_group, DistJson, ExclusionJson, ManifestJson, ReportJson, SpecJson, Q};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: serde_json::Value,
    /// Residual or instance table, when the command has one.
    pub table: Option<Table>,
    pub ok: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.ok {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }

    /// The report text in the configured format.
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match (format, &self.table) {
            (OutputFormat::Json, _) => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            (OutputFormat::Csv, Some(t)) => t.to_csv(),
            (OutputFormat::Csv, None) => Err(CliError::Config("this command has no table to write as CSV".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Classify => classify(cfg),
        Command::Build => build(cfg),
        Command::Verify => verify(cfg),
        Command::Finite => finite(cfg),
    }
}

fn required_spec(cfg: &RunConfig) -> Result<SupernaturalSpec> {
    cfg.spec.as_ref().ok_or_else(|| CliError::Config("--spec is required".into()))?.to_core()
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    config: &'a RunConfig,
    spec: SpecJson,
    case: u8,
    witness_prime: Option<u64>,
    smallest_non_automorphic_prime: Option<u64>,
    conclusion: String,
}

pub fn classify(cfg: &RunConfig) -> Result<Outcome> {
    let spec = required_spec(cfg)?;
    let class = spec.classify();
    let conclusion = match (class.case, class.witness_prime) {
        (SolenoidCase::SomePrimeAutomorphism, Some(p)) => format!(
            "multiplication by {p} is an automorphism: three linear forms can be independent while no distribution lies in Γ(X)∗I(X)"
        ),
        _ => "no prime acts as an automorphism: independence of three linear forms with automorphism coefficients puts some distribution in I(X)".to_string(),
    };
    let report = ClassifyReport {
        config: cfg,
        spec: SpecJson::from_core(&spec),
        case: class.case.number(),
        witness_prime: class.witness_prime,
        smallest_non_automorphic_prime: class.smallest_non_aut_prime,
        conclusion,
    };
    Ok(Outcome { json: serde_json::to_value(report)?, table: None, ok: true })
}

/// The manifest named by the config: a file, or a construction with its
/// parameters.
pub fn manifest_for(cfg: &RunConfig) -> Result<ConstructionManifest> {
    if let Some(path) = &cfg.manifest {
        let text = std::fs::read_to_string(path)?;
        let m: ManifestJson = serde_json::from_str(&text)?;
        return m.to_core();
    }
    let params = cfg.construction.as_ref().ok_or_else(|| CliError::Config("a construction or --manifest is required".into()))?;
    let missing = |what: &str| CliError::Config(format!("--{what} is required for this construction"));
    match params.kind {
        ConstructionKind::Lemma37 => {
            let q = params.q.ok_or_else(|| missing("q"))?;
            let c = params.c.ok_or_else(|| missing("c"))?;
            Ok(build_lemma37_case1(params.p, q, c.0, params.n.unwrap_or(3))?)
        }
        ConstructionKind::Thm41p2 => {
            let spec = match &cfg.spec {
                Some(s) => s.to_core()?,
                None => SupernaturalSpec::new(Height::Finite(0), [(params.p, Height::Infinite)])?,
            };
            let y0 = params.y0.map_or(HElement::integer(1), HElement::from);
            Ok(build_thm41_part2(&spec, params.p, &y0)?)
        }
    }
}

pub fn build(cfg: &RunConfig) -> Result<Outcome> {
    let m = manifest_for(cfg)?;
    Ok(Outcome { json: serde_json::to_value(ManifestJson::from_core(&m))?, table: None, ok: true })
}

fn apply_tampers(cfg: &RunConfig, m: &mut ConstructionManifest) -> Result<()> {
    for t in &cfg.tamper {
        let n = m.fs.len();
        let f = m
            .fs
            .get_mut(t.function)
            .ok_or_else(|| CliError::Config(format!("function index {} out of range for {n} functions", t.function)))?;
        let CharFn::FiniteSupport { entries } = f else {
            return Err(CliError::Config(format!("function {} has no value table to tamper with", t.function)));
        };
        let mut entries = entries.clone();
        entries.insert(t.point.into(), t.value.to_core());
        *f = CharFn::finite_support_unchecked(entries);
    }
    Ok(())
}

#[derive(Serialize)]
struct ExclusionResult {
    exclusion: ExclusionJson,
    /// Per function: whether it lies outside the class on the box.
    excluded: Vec<bool>,
}

#[derive(Serialize)]
struct ObstructionResult {
    divisor: u64,
    witness: Option<Q>,
    holds: bool,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    config: &'a RunConfig,
    construction: String,
    #[serde(rename = "box")]
    tbox: crate::format::BoxJson,
    #[serde(flatten)]
    report: ReportJson,
    equation_expected: bool,
    class_exclusions: Vec<ExclusionResult>,
    /// Only for the forms `(1,1,1), (1,-1,1), (1,-1,-1)` with the equation
    /// holding.
    derived_identities: Option<bool>,
    obstruction: Option<ObstructionResult>,
    expectations_met: bool,
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut m = manifest_for(cfg)?;
    apply_tampers(cfg, &mut m)?;
    let tbox = match &cfg.box_override {
        Some(b) => b.to_core()?,
        None => m.recommended_box.clone(),
    };
    let vcfg = VerifyConfig { tolerance: cfg.tolerance, budget: cfg.budget, ..VerifyConfig::default() };
    let report = sdlab_core::verify_on_box(&m.fs, &m.forms, &m.spec, &tbox, &vcfg)?;

    let mut class_exclusions = Vec::new();
    for &ex in &m.expected.class_exclusions {
        let excluded = m
            .fs
            .iter()
            .map(|f| {
                Ok(!match ex {
                    ClassExclusion::NotIdempotent => f.is_idempotent_on_box(&tbox)?,
                    ClassExclusion::NotGaussIdempotent => f.is_gauss_idem_modulus_on_box(&tbox, cfg.tolerance)?,
                })
            })
            .collect::<Result<Vec<bool>>>()?;
        class_exclusions.push(ExclusionResult { exclusion: ex.into(), excluded });
    }
    let derived_identities = if m.forms == FormsMatrix::three_forms() && report.holds() {
        Some(derived_identities_check(&m.fs, &m.spec, &tbox, &vcfg)?)
    } else {
        None
    };
    let obstruction = m.obstruction.as_ref().map(|o| ObstructionResult {
        divisor: o.divisor,
        witness: o.witness.map(Q::from),
        holds: o.holds(),
    });
    let expectations_met = report.holds() == m.expected.equation_holds
        && class_exclusions.iter().all(|c| c.excluded.iter().all(|&e| e))
        && derived_identities != Some(false)
        && obstruction.as_ref().is_none_or(|o| o.holds);

    let table = Table {
        header: ["point", "lhs", "rhs", "residual"].map(String::from).to_vec(),
        rows: report
            .violations
            .iter()
            .map(|r| {
                let point: Vec<String> = r.point.iter().map(|y| y.to_string()).collect();
                vec![point.join(" "), r.lhs.to_string(), r.rhs.to_string(), format!("{:e}", r.magnitude())]
            })
            .collect(),
    };
    let out = VerifyOutput {
        config: cfg,
        construction: m.name.clone(),
        tbox: crate::format::BoxJson::from_core(&tbox),
        report: ReportJson::from_core(&report),
        equation_expected: m.expected.equation_holds,
        class_exclusions,
        derived_identities,
        obstruction,
        expectations_met,
    };
    Ok(Outcome { json: serde_json::to_value(out)?, table: Some(table), ok: expectations_met })
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    pub seed: u64,
    pub independent: bool,
    pub equation_exact: bool,
    pub equation_float: bool,
    /// Independent under forms with identity first row and column, yet the
    /// distributions are not shifts of one Haar distribution.
    pub flagged: bool,
}

#[derive(Serialize)]
struct FiniteOutput<'a> {
    config: &'a RunConfig,
    group: String,
    instances: usize,
    agreements: usize,
    independent: usize,
    flagged: Vec<u64>,
    results: Vec<InstanceResult>,
}

fn finite_forms(g: &FiniteGroup, spec: &FiniteFormsSpec) -> Result<FiniteForms> {
    match spec {
        FiniteFormsSpec::Preset(s) if s == "three" => Ok(FiniteForms::three_forms(g)),
        FiniteFormsSpec::Preset(s) => Err(CliError::Config(format!("unknown forms preset {s:?}"))),
        FiniteFormsSpec::Matrix(rows) => Ok(FiniteForms::scalars(g, rows)?),
    }
}

/// Independent instances must consist of shifts of the Haar distribution
/// of one common subgroup.
fn common_k(g: &FiniteGroup, dists: &[Dist]) -> bool {
    let classes: Vec<_> = dists.iter().map(|d| idempotent_classify(g, d)).collect();
    classes.iter().all(|c| c.is_shifted_idempotent) && classes.windows(2).all(|w| w[0].k == w[1].k)
}

fn run_instance(g: &FiniteGroup, seed: u64, dists: &[Dist], forms: &FiniteForms, cap: u64) -> Result<InstanceResult> {
    let eq = equivalence_test(g, dists, forms, cap)?;
    Ok(InstanceResult {
        seed,
        independent: eq.independent,
        equation_exact: eq.equation_exact,
        equation_float: eq.equation_float,
        flagged: eq.independent && forms.is_normalized(g) && !common_k(g, dists),
    })
}

fn finite_params(cfg: &RunConfig) -> Result<&FiniteParams> {
    cfg.finite.as_ref().ok_or_else(|| CliError::Config("--group is required".into()))
}

pub fn finite(cfg: &RunConfig) -> Result<Outcome> {
    let params = finite_params(cfg)?;
    let g = parse_group(&params.group)?;
    let forms = params.forms.as_ref().map(|f| finite_forms(&g, f)).transpose()?;
    let mut results = Vec::new();
    match params.mode {
        FiniteMode::Equivalence => {
            for k in 0..params.seeds {
                let seed = cfg.seed.wrapping_add(k);
                let inst = random_instance(&g, params.n, seed);
                let forms = forms.as_ref().unwrap_or(&inst.forms);
                results.push(run_instance(&g, seed, &inst.dists, forms, cfg.budget)?);
            }
        }
        FiniteMode::NonIdempotent => {
            let forms = forms.unwrap_or_else(|| FiniteForms::three_forms(&g));
            for k in 0..params.seeds {
                let seed = cfg.seed.wrapping_add(k);
                let dists: Vec<Dist> =
                    (0..forms.n() as u64).map(|i| random_non_idempotent(&g, seed.wrapping_mul(0x9E37_79B9).wrapping_add(i))).collect();
                results.push(run_instance(&g, seed, &dists, &forms, cfg.budget)?);
            }
        }
        FiniteMode::Given => {
            let given = params.dists.as_ref().ok_or_else(|| CliError::Config("--dists is required".into()))?;
            let dists = given.iter().map(|d| d.to_core(&g)).collect::<Result<Vec<_>>>()?;
            let forms = match forms {
                Some(f) => f,
                None if dists.len() == 3 => FiniteForms::three_forms(&g),
                None if dists.len() == 2 => FiniteForms::scalars(&g, &[vec![1, 1], vec![1, -1]])?,
                None => return Err(CliError::Config("--forms is required for this many distributions".into())),
            };
            results.push(run_instance(&g, cfg.seed, &dists, &forms, cfg.budget)?);
        }
    }
    let agreements = results.iter().filter(|r| r.independent == r.equation_exact && r.independent == r.equation_float).count();
    let independent = results.iter().filter(|r| r.independent).count();
    let flagged: Vec<u64> = results.iter().filter(|r| r.flagged).map(|r| r.seed).collect();
    let ok = agreements == results.len() && flagged.is_empty() && (params.mode != FiniteMode::NonIdempotent || independent == 0);
    let table = Table {
        header: ["seed", "independent", "equation_exact", "equation_float", "flagged"].map(String::from).to_vec(),
        rows: results
            .iter()
            .map(|r| {
                vec![r.seed.to_string(), r.independent.to_string(), r.equation_exact.to_string(), r.equation_float.to_string(), r.flagged.to_string()]
            })
            .collect(),
    };
    let out = FiniteOutput {
        config: cfg,
        group: group_to_string(&g),
        instances: results.len(),
        agreements,
        independent,
        flagged,
        results,
    };
    Ok(Outcome { json: serde_json::to_value(out)?, table: Some(table), ok })
}

/// Reads a JSON array of distributions.
pub fn read_dists(path: &str) -> Result<Vec<DistJson>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
