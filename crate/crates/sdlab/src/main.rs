//! `sdlab`: classify solenoids, build and verify constructions, run the
//! finite oracle.
//!
//! Exit codes: 0 when every expectation is met, 1 on a violation, 2 on a
//! config or budget error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sdlab::config::{
    resolve_budget, Command, ConstructionKind, ConstructionParams, FiniteFormsSpec, FiniteMode, FiniteParams,
    OutputFormat, RunConfig, Tamper, BUDGET_ENV,
};
use sdlab::format::{BoxJson, SpecJson, Q};
use sdlab::{CliError, Result, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "sdlab", version, about = "Skitovich-Darmois checks on a-adic solenoids and finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Which primes act as automorphisms, and what that implies
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Write a construction manifest
    Build {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Check a construction on a box
    Verify {
        #[command(flatten)]
        construction: ConstructionArgs,
        /// Manifest file, instead of construction parameters.
        #[arg(long, conflicts_with = "construction")]
        manifest: Option<PathBuf>,
        /// Comma-separated box generators, e.g. `1,1/5`.
        #[arg(long, requires = "box_bound")]
        box_gens: Option<String>,
        #[arg(long, requires = "box_gens")]
        box_bound: Option<u32>,
        /// Overwrite one value, `index:point:value` (repeatable).
        #[arg(long)]
        tamper: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Independence against the equation on a finite group
    Finite {
        /// Moduli, e.g. `4,3`.
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Equivalence)]
        mode: ModeArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of random instances, starting at `--seed`.
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        /// `three`, or a JSON matrix of scalar coefficients.
        #[arg(long)]
        forms: Option<String>,
        /// JSON array of distributions (mode `given`).
        #[arg(long)]
        dists: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Equivalence,
    NonIdempotent,
    Given,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Lemma37,
    Thm41p2,
}

#[derive(Debug, Args)]
struct ConstructionArgs {
    #[arg(long, value_enum)]
    construction: Option<KindArg>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON height spec, or a file holding one.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Point cap; falls back to SD_LAB_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn read_json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with(['{', '[']) { arg.to_string() } else { std::fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

fn base_config(command: Command, common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(command);
    cfg.spec = common.spec.as_deref().map(read_json_arg::<SpecJson>).transpose()?;
    if let Some(t) = common.tolerance {
        cfg.tolerance = t;
    }
    cfg.budget = resolve_budget(common.budget, std::env::var(BUDGET_ENV).ok().as_deref())?;
    cfg.seed = common.seed;
    cfg.format = match common.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    Ok(cfg)
}

fn construction(args: &ConstructionArgs) -> Result<Option<ConstructionParams>> {
    let Some(kind) = args.construction else {
        return Ok(None);
    };
    let p = args.p.ok_or_else(|| CliError::Config("--p is required".into()))?;
    Ok(Some(ConstructionParams {
        kind: match kind {
            KindArg::Lemma37 => ConstructionKind::Lemma37,
            KindArg::Thm41p2 => ConstructionKind::Thm41p2,
        },
        p,
        q: args.q,
        c: args.c.as_deref().map(str::parse::<Q>).transpose()?,
        n: args.n,
        y0: args.y0.as_deref().map(str::parse::<Q>).transpose()?,
    }))
}

fn config(cli: &Cli) -> Result<(RunConfig, Option<PathBuf>)> {
    match &cli.command {
        Cmd::Classify { common } => Ok((base_config(Command::Classify, common)?, common.out.clone())),
        Cmd::Build { construction: c, common } => {
            let mut cfg = base_config(Command::Build, common)?;
            cfg.construction = construction(c)?;
            Ok((cfg, common.out.clone()))
        }
        Cmd::Verify { construction: c, manifest, box_gens, box_bound, tamper, common } => {
            let mut cfg = base_config(Command::Verify, common)?;
            cfg.construction = construction(c)?;
            cfg.manifest = manifest.as_ref().map(|p| p.display().to_string());
            if let (Some(gens), Some(bound)) = (box_gens, box_bound) {
                let generators = gens.split(',').map(str::parse::<Q>).collect::<Result<Vec<_>>>()?;
                cfg.box_override = Some(BoxJson { generators, bound: *bound });
            }
            cfg.tamper = tamper.iter().map(|t| t.parse::<Tamper>()).collect::<Result<_>>()?;
            Ok((cfg, common.out.clone()))
        }
        Cmd::Finite { group, mode, n, seeds, forms, dists, common } => {
            let mut cfg = base_config(Command::Finite, common)?;
            let forms = match forms.as_deref() {
                None => None,
                Some(f) if f.trim_start().starts_with('[') => Some(FiniteFormsSpec::Matrix(serde_json::from_str(f)?)),
                Some(f) => Some(FiniteFormsSpec::Preset(f.to_string())),
            };
            let dists = dists.as_ref().map(|p| sdlab::commands::read_dists(&p.display().to_string())).transpose()?;
            cfg.finite = Some(FiniteParams {
                group: group.clone(),
                mode: match mode {
                    ModeArg::Equivalence => FiniteMode::Equivalence,
                    ModeArg::NonIdempotent => FiniteMode::NonIdempotent,
                    ModeArg::Given => FiniteMode::Given,
                },
                n: *n,
                seeds: *seeds,
                forms,
                dists,
            });
            Ok((cfg, common.out.clone()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|(cfg, out)| {
        let outcome = sdlab::run(&cfg)?;
        let text = outcome.render(cfg.format)?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(outcome.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sdlab: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
