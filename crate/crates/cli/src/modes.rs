//! The three benchmark modes and their result files.
//!
//! Every run writes `<out>.manifest.json` (the fully resolved manifest) and
//! `<out>.summary.csv`. Optimize runs add `<out>.jsonl` (one record per
//! oracle evaluation plus a final summary record); generation runs add
//! `<out>.report.json` and `<out>.smi` with the generated molecules.
//! Outputs contain no timestamps, so equal manifests produce byte-equal
//! files.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use molga::engine::{self, EvalRecord, RunResult};
use molga::genops::{self, OpStats};
use molga::metrics;
use molga::molgraph::{CanonicalForm, MolGraph};
use molga::reference::{self, ReferenceSet};
use molga::{sampler, Error, Score};

use crate::manifest::{CliError, Manifest, Mode};

pub fn run(manifest: &Manifest) -> Result<(), CliError> {
    let reference = load_reference(manifest)?;
    match manifest.mode {
        Mode::Optimize => run_optimize(manifest, &reference),
        Mode::Generate => run_generate(manifest, &reference),
        Mode::AddcarbonBaseline => run_addcarbon(manifest, &reference),
    }
}

fn load_reference(manifest: &Manifest) -> Result<ReferenceSet, CliError> {
    let set = reference::load_reference(&manifest.reference).map_err(|e| {
        CliError::Reference(format!("{}: {e}", manifest.reference.display()))
    })?;
    for rejection in set.rejections.iter().take(20) {
        eprintln!(
            "{}:{}: rejected {:?}: {}",
            manifest.reference.display(),
            rejection.line,
            rejection.text,
            rejection.error
        );
    }
    if set.rejected() > 20 {
        eprintln!("... and {} further rejections", set.rejected() - 20);
    }
    if set.molecules.is_empty() {
        return Err(CliError::Reference(format!(
            "{}: no usable molecules ({} rejected lines)",
            manifest.reference.display(),
            set.rejected()
        )));
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OptimizeSummary<'a> {
    oracle: &'a str,
    budget: u64,
    used: u64,
    steps: u64,
    stalled: bool,
    auc_top10: Option<Score>,
    final_top10_mean: Option<Score>,
    best_score: Option<Score>,
    best_canonical: Option<&'a str>,
    population_size: usize,
    stats: &'a OpStats,
}

fn run_optimize(manifest: &Manifest, reference: &ReferenceSet) -> Result<(), CliError> {
    let spec = manifest.oracle.as_deref().expect("resolution enforced an oracle");
    let oracle = crate::manifest::build_oracle(spec)?;
    let result: RunResult<Score> =
        engine::run(&manifest.ga, oracle.as_ref(), &reference.molecules).map_err(map_run_error)?;

    let auc = match result.history.is_empty() {
        true => None,
        false => Some(
            metrics::auc_top10(&result.scores(), manifest.ga.budget as usize)
                .map_err(|e| CliError::Output(e.to_string()))?,
        ),
    };

    let best = result.best();
    let summary = OptimizeSummary {
        oracle: spec,
        budget: manifest.ga.budget,
        used: result.history.len() as u64,
        steps: result.steps,
        stalled: result.stalled,
        auc_top10: auc.as_ref().map(|a| a.auc_top10),
        final_top10_mean: auc.as_ref().map(|a| a.final_top10_mean),
        best_score: best.map(|b| b.score),
        best_canonical: best.map(|b| b.canonical.as_str()),
        population_size: result.population.len(),
        stats: &result.stats,
    };

    write_manifest(manifest)?;
    write_jsonl(&with_ext(&manifest.out, "jsonl"), &result.history, &summary)?;
    let csv = format!(
        "mode,oracle,seed,budget,used,steps,stalled,auc_top10,final_top10_mean,best_score,best_canonical\n{},{},{},{},{},{},{},{},{},{},{}\n",
        manifest.mode.name(),
        spec,
        manifest.ga.seed,
        summary.budget,
        summary.used,
        summary.steps,
        summary.stalled,
        csv_opt(summary.auc_top10),
        csv_opt(summary.final_top10_mean),
        csv_opt(summary.best_score),
        summary.best_canonical.unwrap_or(""),
    );
    write_file(&with_ext(&manifest.out, "summary.csv"), &csv)?;

    match &auc {
        Some(report) => println!("{}", metrics::render_auc_row(spec, report)),
        None => println!("| {spec} | no evaluations |"),
    }
    println!(
        "used {} of {} evaluations in {} steps{}; best {} ({})",
        summary.used,
        summary.budget,
        summary.steps,
        if summary.stalled { " (stalled)" } else { "" },
        summary.best_score.map_or("-".into(), |s| format!("{s:.6}")),
        summary.best_canonical.unwrap_or("-"),
    );
    Ok(())
}

fn map_run_error(e: Error) -> CliError {
    match e {
        Error::Oracle(m) => CliError::Oracle(m),
        Error::EmptyReference => CliError::Reference("reference set is empty".into()),
        other => CliError::Config(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// generate / addcarbon-baseline
// ---------------------------------------------------------------------------

struct Generated {
    outcomes: Vec<Option<CanonicalForm>>,
    stats: OpStats,
}

fn run_generate(manifest: &Manifest, reference: &ReferenceSet) -> Result<(), CliError> {
    let pop = canonicalize_reference(reference)?;
    let mut rng = ChaCha8Rng::seed_from_u64(manifest.ga.seed);
    let mut stats = OpStats::default();
    let mut outcomes: Vec<Option<CanonicalForm>> = Vec::with_capacity(manifest.n);

    if manifest.n > 0 {
        // one sampler pass and one operator pass over the reference as the
        // ranked population (reference file order is the ranking)
        let ranks = sampler::sample_batch::<Score, _>(
            pop.len(),
            2 * manifest.n,
            &manifest.ga.sampler,
            &mut rng,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        for i in 0..manifest.n {
            let (ga, ca) = &pop[ranks[2 * i]];
            let (gb, cb) = &pop[ranks[2 * i + 1]];
            let off = genops::spawn_offspring(
                (ga, ca),
                (gb, cb),
                &manifest.ga.operator_weights,
                &manifest.ga.mix,
                &mut rng,
                &mut stats,
            );
            outcomes.push(off.graph.canonical_form().ok());
        }
    }
    finish_generation(manifest, &pop, Generated { outcomes, stats })
}

fn run_addcarbon(manifest: &Manifest, reference: &ReferenceSet) -> Result<(), CliError> {
    let pop = canonicalize_reference(reference)?;
    let mut rng = ChaCha8Rng::seed_from_u64(manifest.ga.seed);
    let mut outcomes: Vec<Option<CanonicalForm>> = Vec::with_capacity(manifest.n);
    for _ in 0..manifest.n {
        // a reference molecule without a free valence cannot take the extra
        // carbon; resample a bounded number of times before counting a miss
        let mut produced = None;
        for _ in 0..genops::MAX_EDIT_ATTEMPTS {
            let pick = rng.gen_range(0..pop.len());
            match genops::add_carbon(&pop[pick].0, &mut rng) {
                Ok(graph) => {
                    produced = graph.canonical_form().ok();
                    break;
                }
                Err(Error::NoFreeValence) => continue,
                Err(e) => return Err(CliError::Config(e.to_string())),
            }
        }
        outcomes.push(produced);
    }
    finish_generation(
        manifest,
        &pop,
        Generated {
            outcomes,
            stats: OpStats::default(),
        },
    )
}

fn canonicalize_reference(
    reference: &ReferenceSet,
) -> Result<Vec<(MolGraph, CanonicalForm)>, CliError> {
    reference
        .molecules
        .iter()
        .map(|g| {
            let c = g
                .canonical_form()
                .map_err(|e| CliError::Reference(e.to_string()))?;
            Ok((g.clone(), c))
        })
        .collect()
}

fn finish_generation(
    manifest: &Manifest,
    pop: &[(MolGraph, CanonicalForm)],
    generated: Generated,
) -> Result<(), CliError> {
    let reference_set: BTreeSet<String> =
        pop.iter().map(|(_, c)| c.as_str().to_string()).collect();
    let report = metrics::generation_metrics(&generated.outcomes, &reference_set);

    #[derive(Serialize)]
    struct ReportFile<'a> {
        #[serde(flatten)]
        report: &'a metrics::GenerationReport,
        stats: &'a OpStats,
    }
    write_manifest(manifest)?;
    let report_json = serde_json::to_string_pretty(&ReportFile {
        report: &report,
        stats: &generated.stats,
    })
    .map_err(|e| CliError::Output(e.to_string()))?;
    write_file(&with_ext(&manifest.out, "report.json"), &report_json)?;

    let mut smi = String::new();
    for outcome in generated.outcomes.iter().flatten() {
        smi.push_str(outcome.as_str());
        smi.push('\n');
    }
    write_file(&with_ext(&manifest.out, "smi"), &smi)?;

    let csv = format!(
        "mode,seed,n,n_valid,n_unique,n_novel,validity,uniqueness,novelty\n{},{},{},{},{},{},{},{},{}\n",
        manifest.mode.name(),
        manifest.ga.seed,
        report.n_generated,
        report.n_valid,
        report.n_unique,
        report.n_novel,
        report.validity,
        report.uniqueness,
        report.novelty,
    );
    write_file(&with_ext(&manifest.out, "summary.csv"), &csv)?;

    println!(
        "{}",
        metrics::render_generation_row(manifest.mode.name(), &report)
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

pub fn with_ext(out: &Path, ext: &str) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(ext);
    out.with_file_name(name)
}

fn write_manifest(manifest: &Manifest) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Output(e.to_string()))?;
    write_file(&with_ext(&manifest.out, "manifest.json"), &json)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn write_jsonl(
    path: &Path,
    history: &[EvalRecord<Score>],
    summary: &OptimizeSummary<'_>,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    for record in history {
        serde_json::to_writer(&mut buf, record)
            .map_err(|e| CliError::Output(e.to_string()))?;
        buf.push(b'\n');
    }
    #[derive(Serialize)]
    struct SummaryLine<'a> {
        summary: &'a OptimizeSummary<'a>,
    }
    serde_json::to_writer(&mut buf, &SummaryLine { summary })
        .map_err(|e| CliError::Output(e.to_string()))?;
    buf.push(b'\n');
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        }
    }
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    file.write_all(&buf)
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn csv_opt(v: Option<Score>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}
