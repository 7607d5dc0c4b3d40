//! Run manifests: config file schema, flag resolution, and oracle specs.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use molga::engine::GaConfig;
use molga::genops::{MixConfig, OperatorWeights};
use molga::molgraph::Formula;
use molga::oracles::{
    ConstantOracle, ExternalOracle, GeometricMpo, HeavyAtomTarget, IsomerOracle, Oracle,
    RingCountTarget, SimilarityOracle,
};
use molga::sampler::{SampleMode, SamplerConfig};
use molga::{smiles, Score};

/// Failures mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// exit 2
    Config(String),
    /// exit 3
    Reference(String),
    /// exit 4
    Oracle(String),
    /// exit 1
    Output(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Reference(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Reference(m) => write!(f, "reference error: {m}"),
            CliError::Oracle(m) => write!(f, "oracle error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Optimize,
    Generate,
    AddcarbonBaseline,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Optimize => "optimize",
            Mode::Generate => "generate",
            Mode::AddcarbonBaseline => "addcarbon-baseline",
        }
    }
}

/// Command-line flags. Every field can also come from the config file;
/// flags win.
#[derive(Debug, clap::Parser)]
#[command(
    name = "molga",
    about = "Budgeted genetic-algorithm engine for molecular graphs",
    version
)]
pub struct Cli {
    /// Benchmark mode.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Reference set: one SMILES per line, '#' comments allowed.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Oracle spec, e.g. rediscovery:SMILES, isomer:C7H8N2O2, const:0,
    /// heavy:20, rings:3, mpo:SPEC@W;SPEC@W, external:COMMAND.
    #[arg(long)]
    pub oracle: Option<String>,
    /// Oracle evaluation budget.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Molecules produced per iteration.
    #[arg(long)]
    pub offspring_size: Option<usize>,
    /// Population capacity.
    #[arg(long)]
    pub population_size: Option<usize>,
    /// RNG seed; equal seeds reproduce runs byte for byte.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample count for generate and addcarbon-baseline modes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Output prefix; writes <out>.jsonl / .report.json / .summary.csv /
    /// .manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    reference: Option<PathBuf>,
    oracle: Option<String>,
    n: Option<usize>,
    #[serde(default)]
    ga: GaFileConfig,
    #[serde(default)]
    sampler: SamplerFileConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaFileConfig {
    population_size: Option<usize>,
    offspring_size: Option<usize>,
    budget: Option<u64>,
    init_counts_budget: Option<bool>,
    stall_steps: Option<u64>,
    operator_weights: Option<OperatorWeights>,
    mix: Option<MixConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplerFileConfig {
    mode: Option<String>,
    min_exponent: Option<f64>,
}

/// Fully resolved run description; serialized verbatim as the manifest
/// echo so a run can be repeated bit for bit.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub mode: Mode,
    pub reference: PathBuf,
    pub oracle: Option<String>,
    pub n: usize,
    pub out: PathBuf,
    pub ga: GaConfig,
}

pub fn resolve(cli: &Cli) -> Result<Manifest, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let mode = match (&cli.mode, &file.mode) {
        (Some(m), _) => *m,
        (None, Some(s)) => match s.as_str() {
            "optimize" => Mode::Optimize,
            "generate" => Mode::Generate,
            "addcarbon-baseline" => Mode::AddcarbonBaseline,
            other => {
                return Err(CliError::Config(format!(
                    "unknown mode {other:?} (optimize | generate | addcarbon-baseline)"
                )))
            }
        },
        (None, None) => {
            return Err(CliError::Config(
                "no mode given (--mode or `mode` in the config file)".into(),
            ))
        }
    };

    let reference = cli
        .reference
        .clone()
        .or(file.reference)
        .ok_or_else(|| CliError::Config("a reference set is required (--reference)".into()))?;

    let oracle = cli.oracle.clone().or(file.oracle);
    if mode == Mode::Optimize && oracle.is_none() {
        return Err(CliError::Config(
            "optimize mode requires an oracle (--oracle)".into(),
        ));
    }

    let sampler_mode = match file.sampler.mode.as_deref() {
        None => SampleMode::QuasiGrid,
        Some("quasi_grid") => SampleMode::QuasiGrid,
        Some("random") => SampleMode::Random,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown sampler.mode {other:?} (quasi_grid | random)"
            )))
        }
    };
    // unconditional generation runs on small desk-scale references where
    // the full exponent span collapses onto the very top ranks, so it gets
    // a gentler default; optimize keeps the full span
    let default_min_exponent = match mode {
        Mode::Optimize => -3.0,
        Mode::Generate | Mode::AddcarbonBaseline => -1.5,
    };
    let sampler = SamplerConfig {
        mode: sampler_mode,
        min_exponent: file.sampler.min_exponent.unwrap_or(default_min_exponent),
    };
    // generation modes also default to size-weighted fragment retention:
    // uniform retention floods a small reference with tiny duplicate
    // fragments
    let mut mix = file.ga.mix.unwrap_or_default();
    if file.ga.mix.is_none() && mode != Mode::Optimize {
        mix.fragment_bias = molga::genops::FragmentBias::Size;
    }

    let threads = match std::env::var("MOLGA_THREADS") {
        Err(_) => 1,
        Ok(v) => v.trim().parse::<usize>().ok().filter(|t| *t >= 1).ok_or_else(|| {
            CliError::Config(format!("MOLGA_THREADS must be a positive integer, got {v:?}"))
        })?,
    };

    let ga = GaConfig {
        population_size: cli
            .population_size
            .or(file.ga.population_size)
            .unwrap_or(100),
        offspring_size: cli.offspring_size.or(file.ga.offspring_size).unwrap_or(5),
        budget: cli.budget.or(file.ga.budget).unwrap_or(10_000),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        operator_weights: file.ga.operator_weights.unwrap_or_default(),
        mix,
        sampler,
        init_counts_budget: file.ga.init_counts_budget.unwrap_or(true),
        stall_steps: file.ga.stall_steps.unwrap_or(100),
        threads,
    };
    if mode == Mode::Optimize {
        ga.validate().map_err(|e| CliError::Config(e.to_string()))?;
    } else {
        ga.operator_weights
            .validate()
            .and_then(|_| ga.mix.validate())
            .and_then(|_| ga.sampler.validate())
            .map_err(|e| CliError::Config(e.to_string()))?;
    }

    Ok(Manifest {
        mode,
        reference,
        oracle,
        n: cli.n.or(file.n).unwrap_or(10_000),
        out: cli.out.clone().or(file.out).unwrap_or_else(|| "molga-run".into()),
        ga,
    })
}

/// Builds an oracle from its spec string.
pub fn build_oracle(spec: &str) -> Result<Box<dyn Oracle<Score>>, CliError> {
    let bad = |msg: String| CliError::Config(msg);
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("oracle spec {spec:?} needs the form kind:arg")))?;
    match kind {
        "const" => {
            let value: Score = arg
                .parse()
                .map_err(|_| bad(format!("const oracle needs a number, got {arg:?}")))?;
            Ok(Box::new(ConstantOracle::new(value)))
        }
        "similarity" | "rediscovery" => {
            let target = smiles::parse(arg)
                .map_err(|e| bad(format!("oracle target {arg:?}: {e}")))?;
            let oracle = SimilarityOracle::new(spec, &target)
                .map_err(|e| bad(format!("oracle target {arg:?}: {e}")))?;
            Ok(Box::new(oracle))
        }
        "isomer" => {
            let formula = Formula::parse(arg)
                .map_err(|e| bad(format!("isomer formula {arg:?}: {e}")))?;
            Ok(Box::new(IsomerOracle::new(formula)))
        }
        "heavy" => {
            let n: usize = arg
                .parse()
                .map_err(|_| bad(format!("heavy oracle needs a count, got {arg:?}")))?;
            Ok(Box::new(HeavyAtomTarget::new(n)))
        }
        "rings" => {
            let n: usize = arg
                .parse()
                .map_err(|_| bad(format!("rings oracle needs a count, got {arg:?}")))?;
            Ok(Box::new(RingCountTarget::new(n)))
        }
        "mpo" => {
            let mut components: Vec<(Box<dyn Oracle<Score>>, Score)> = Vec::new();
            for part in arg.split(';').filter(|p| !p.is_empty()) {
                let (sub, weight) = match part.rsplit_once('@') {
                    Some((sub, w)) => {
                        let w: Score = w.parse().map_err(|_| {
                            bad(format!("mpo weight in {part:?} must be a number"))
                        })?;
                        (sub, w)
                    }
                    None => (part, 1.0),
                };
                if sub.starts_with("mpo:") {
                    return Err(bad("mpo components cannot nest".into()));
                }
                components.push((build_oracle(sub)?, weight));
            }
            let mpo = GeometricMpo::new(spec, components)
                .map_err(|e| bad(e.to_string()))?;
            Ok(Box::new(mpo))
        }
        "external" => {
            let oracle = ExternalOracle::spawn(arg)
                .map_err(|e| CliError::Oracle(e.to_string()))?;
            Ok(Box::new(oracle))
        }
        other => Err(bad(format!(
            "unknown oracle kind {other:?} (const | similarity | rediscovery | isomer | heavy | rings | mpo | external)"
        ))),
    }
}
