//! The genetic-algorithm loop: population initialization, quantile parent
//! sampling, offspring generation, budget-accounted scoring, and greedy
//! selection, iterated until the evaluation budget is spent.

mod ledger;
mod population;

pub use ledger::{BudgetLedger, EvalRecord};
pub use population::{MemberSummary, Population, ScoredMol};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genops::{self, MixConfig, Offspring, OpStats, OperatorKind, OperatorWeights};
use crate::molgraph::MolGraph;
use crate::oracles::Oracle;
use crate::sampler::{self, SamplerConfig};
use crate::scalar::Scalar;

/// Full engine configuration. Defaults: population 100, five offspring per
/// step, a 10,000-evaluation budget, and quasi-grid quantile sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub offspring_size: usize,
    pub budget: u64,
    pub seed: u64,
    pub operator_weights: OperatorWeights,
    pub mix: MixConfig,
    pub sampler: SamplerConfig,
    /// Charge initial-population scoring against the budget.
    pub init_counts_budget: bool,
    /// Stop after this many consecutive steps with zero fresh evaluations
    /// (the reachable molecule supply is exhausted).
    pub stall_steps: u64,
    /// Worker threads for oracle evaluation within a step. Results commit
    /// in sampling order, so the outcome is independent of this value.
    pub threads: usize,
}

impl Default for GaConfig {
    fn default() -> GaConfig {
        GaConfig {
            population_size: 100,
            offspring_size: 5,
            budget: 10_000,
            seed: 0,
            operator_weights: OperatorWeights::default(),
            mix: MixConfig::default(),
            sampler: SamplerConfig::default(),
            init_counts_budget: true,
            stall_steps: 100,
            threads: 1,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if self.offspring_size < 1 {
            return Err(Error::Config("offspring_size must be at least 1".into()));
        }
        if self.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.init_counts_budget && self.population_size as u64 > self.budget {
            return Err(Error::Config(format!(
                "population_size {} exceeds budget {}",
                self.population_size, self.budget
            )));
        }
        if self.stall_steps < 1 {
            return Err(Error::Config("stall_steps must be at least 1".into()));
        }
        if self.threads < 1 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.operator_weights.validate()?;
        self.mix.validate()?;
        self.sampler.validate()
    }
}

/// Outcome of one engine step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    pub fresh_evals: u64,
    pub budget_hit: bool,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct RunResult<F: Scalar> {
    pub population: Population<F>,
    pub history: Vec<EvalRecord<F>>,
    pub steps: u64,
    /// True when the run ended by stalling (supply exhausted) rather than
    /// by spending the budget.
    pub stalled: bool,
    pub stats: OpStats,
}

impl<F: Scalar> RunResult<F> {
    pub fn best(&self) -> Option<&ScoredMol<F>> {
        self.population.best()
    }

    pub fn scores(&self) -> Vec<F> {
        self.history.iter().map(|r| r.score).collect()
    }
}

/// Draws `population_size` reference molecules uniformly (seeded shuffle),
/// deduplicates by canonical form, and scores them through the ledger.
pub fn init_population<F: Scalar>(
    reference: &[MolGraph],
    oracle: &dyn Oracle<F>,
    config: &GaConfig,
    ledger: &mut BudgetLedger<F>,
    rng: &mut ChaCha8Rng,
) -> Result<Population<F>> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    let mut order: Vec<usize> = (0..reference.len()).collect();
    use rand::seq::SliceRandom;
    order.shuffle(rng);

    let mut members: Vec<ScoredMol<F>> = Vec::with_capacity(config.population_size);
    let mut taken = std::collections::HashSet::new();
    for idx in order {
        if members.len() == config.population_size {
            break;
        }
        let graph = &reference[idx];
        let canonical = graph.canonical_form()?;
        if !taken.insert(canonical.as_str().to_string()) {
            continue;
        }
        let (score, eval_index) = if config.init_counts_budget {
            ledger.score_with(canonical.as_str(), OperatorKind::Init.name(), &[], || {
                oracle.score(graph)
            })?
        } else {
            match ledger.cached(canonical.as_str()) {
                Some(s) => (s, None),
                None => {
                    let s = oracle.score(graph)?;
                    ledger.prime(canonical.as_str(), s)?;
                    (s, None)
                }
            }
        };
        members.push(ScoredMol {
            canonical,
            graph: graph.clone(),
            score,
            eval_index,
        });
    }
    Ok(Population::select(
        Population::new(config.population_size),
        members,
        config.population_size,
    ))
}

/// One generation: sample parents, spawn offspring, score what the budget
/// allows, select the next population greedily. Running out of budget
/// mid-step stops scoring and still performs selection with what was
/// scored.
pub fn step<F: Scalar>(
    population: &mut Population<F>,
    oracle: &dyn Oracle<F>,
    config: &GaConfig,
    ledger: &mut BudgetLedger<F>,
    rng: &mut ChaCha8Rng,
    stats: &mut OpStats,
) -> Result<StepReport> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let parent_ranks = sampler::sample_batch::<F, _>(
        population.len(),
        2 * config.offspring_size,
        &config.sampler,
        rng,
    )?;
    let mut offspring: Vec<Offspring> = Vec::with_capacity(config.offspring_size);
    for i in 0..config.offspring_size {
        let pa = &population.ranked()[parent_ranks[2 * i]];
        let pb = &population.ranked()[parent_ranks[2 * i + 1]];
        offspring.push(genops::spawn_offspring(
            (&pa.graph, &pa.canonical),
            (&pb.graph, &pb.canonical),
            &config.operator_weights,
            &config.mix,
            rng,
            stats,
        ));
    }

    let before = ledger.used();
    let scored = score_offspring(offspring, oracle, ledger, config.threads)?;
    let fresh = ledger.used() - before;

    let capacity = population.capacity();
    let current = std::mem::replace(population, Population::new(capacity));
    *population = Population::select(current, scored, capacity);
    Ok(StepReport {
        fresh_evals: fresh,
        budget_hit: ledger.is_exhausted(),
    })
}

/// Scores offspring in generation order. Evaluation stops at the first
/// uncached candidate past the budget; everything before it is kept.
/// With `threads > 1` fresh evaluations run in parallel but commit to the
/// ledger in generation order, so eval indices never depend on thread
/// scheduling.
fn score_offspring<F: Scalar>(
    offspring: Vec<Offspring>,
    oracle: &dyn Oracle<F>,
    ledger: &mut BudgetLedger<F>,
    threads: usize,
) -> Result<Vec<ScoredMol<F>>> {
    struct Candidate {
        offspring: Offspring,
        canonical: crate::molgraph::CanonicalForm,
        /// position in the fresh-evaluation list, if this is the first
        /// occurrence of an uncached form
        fresh_slot: Option<usize>,
    }

    // plan fresh evaluations in order, cutting off at the remaining budget
    let mut candidates: Vec<Candidate> = Vec::with_capacity(offspring.len());
    let mut fresh: Vec<usize> = Vec::new(); // candidate indices
    let mut batch_new: std::collections::HashSet<String> = std::collections::HashSet::new();
    let remaining = ledger.remaining() as usize;
    for off in offspring {
        let canonical = off.graph.canonical_form()?;
        let key = canonical.as_str();
        let cached = ledger.cached(key).is_some() || batch_new.contains(key);
        let fresh_slot = if cached {
            None
        } else {
            if fresh.len() == remaining {
                // budget exhausted mid-step: score nothing further
                break;
            }
            batch_new.insert(key.to_string());
            fresh.push(candidates.len());
            Some(fresh.len() - 1)
        };
        candidates.push(Candidate {
            offspring: off,
            canonical,
            fresh_slot,
        });
    }

    // evaluate fresh candidates, optionally in parallel
    let fresh_scores: Vec<Result<F>> = if threads > 1 && fresh.len() > 1 {
        let jobs: Vec<&MolGraph> = fresh
            .iter()
            .map(|&ci| &candidates[ci].offspring.graph)
            .collect();
        let mut results: Vec<Option<Result<F>>> = (0..jobs.len()).map(|_| None).collect();
        let chunk = jobs.len().div_ceil(threads);
        std::thread::scope(|scope| {
            for (jobs_chunk, results_chunk) in
                jobs.chunks(chunk).zip(results.chunks_mut(chunk))
            {
                scope.spawn(move || {
                    for (graph, slot) in jobs_chunk.iter().zip(results_chunk.iter_mut()) {
                        *slot = Some(oracle.score(graph));
                    }
                });
            }
        });
        results
            .into_iter()
            .map(|r| r.expect("every job ran"))
            .collect()
    } else {
        fresh
            .iter()
            .map(|&ci| oracle.score(&candidates[ci].offspring.graph))
            .collect()
    };

    // commit in generation order, then assemble the scored batch
    let mut scored: Vec<ScoredMol<F>> = Vec::with_capacity(candidates.len());
    let mut fresh_index: Vec<Option<u64>> = vec![None; fresh_scores.len()];
    for candidate in candidates {
        let (score, eval_index) = match candidate.fresh_slot {
            Some(slot) => {
                let score = fresh_scores[slot].clone()?;
                let parents: Vec<String> = candidate
                    .offspring
                    .parents
                    .iter()
                    .map(|c| c.as_str().to_string())
                    .collect();
                let idx = ledger.commit(
                    candidate.canonical.as_str(),
                    candidate.offspring.operator.name(),
                    &parents,
                    score,
                )?;
                fresh_index[slot] = Some(idx);
                (score, Some(idx))
            }
            None => {
                let score = ledger
                    .cached(candidate.canonical.as_str())
                    .expect("planned as cached");
                (score, None)
            }
        };
        scored.push(ScoredMol {
            canonical: candidate.canonical,
            graph: candidate.offspring.graph,
            score,
            eval_index,
        });
    }
    Ok(scored)
}

/// Runs the full loop: init, then steps until the budget is spent or the
/// reachable supply stalls. Deterministic given the config seed.
pub fn run<F: Scalar>(
    config: &GaConfig,
    oracle: &dyn Oracle<F>,
    reference: &[MolGraph],
) -> Result<RunResult<F>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ledger = BudgetLedger::new(config.budget);
    let mut stats = OpStats::default();
    let mut population = init_population(reference, oracle, config, &mut ledger, &mut rng)?;

    let mut steps = 0u64;
    let mut stall = 0u64;
    let mut stalled = false;
    while !ledger.is_exhausted() {
        let report = step(
            &mut population,
            oracle,
            config,
            &mut ledger,
            &mut rng,
            &mut stats,
        )?;
        steps += 1;
        if report.fresh_evals == 0 {
            stall += 1;
            if stall >= config.stall_steps {
                stalled = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    Ok(RunResult {
        population,
        history: ledger.into_history(),
        steps,
        stalled,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{ConstantOracle, SimilarityOracle};
    use crate::smiles::parse;

    fn reference(smiles: &[&str]) -> Vec<MolGraph> {
        smiles.iter().map(|s| parse(s).unwrap()).collect()
    }

    fn small_config(population: usize, offspring: usize, budget: u64, seed: u64) -> GaConfig {
        GaConfig {
            population_size: population,
            offspring_size: offspring,
            budget,
            seed,
            ..GaConfig::default()
        }
    }

    #[test]
    fn init_includes_exact_reference() {
        let refs = reference(&["C", "CC", "CCC", "CCO"]);
        let config = small_config(4, 5, 100, 1);
        let oracle = ConstantOracle::new(0.25f64);
        let mut ledger = BudgetLedger::new(config.budget);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let pop = init_population(&refs, &oracle, &config, &mut ledger, &mut rng).unwrap();
        assert_eq!(pop.len(), 4);
        assert_eq!(ledger.used(), 4);
    }

    #[test]
    fn init_deduplicates_before_scoring() {
        let refs = reference(&["CCO", "OCC", "C(O)C", "CC"]);
        let config = small_config(4, 5, 100, 1);
        let oracle = ConstantOracle::new(0.0f64);
        let mut ledger = BudgetLedger::new(config.budget);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let pop = init_population(&refs, &oracle, &config, &mut ledger, &mut rng).unwrap();
        // three spellings of ethanol collapse to one member
        assert_eq!(pop.len(), 2);
        assert_eq!(ledger.used(), 2);
    }

    #[test]
    fn empty_reference_rejected() {
        let config = small_config(2, 5, 100, 1);
        let oracle = ConstantOracle::new(0.0f64);
        let mut ledger = BudgetLedger::new(config.budget);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            init_population(&[], &oracle, &config, &mut ledger, &mut rng),
            Err(Error::EmptyReference)
        ));
    }

    #[test]
    fn constant_oracle_spends_exact_budget() {
        let refs = reference(&["CCO", "CCN", "CCC", "CC(C)C", "c1ccccc1"]);
        let config = small_config(5, 5, 60, 7);
        let oracle = ConstantOracle::new(0.0f64);
        let result = run(&config, &oracle, &refs).unwrap();
        assert_eq!(result.history.len(), 60);
        assert!(!result.stalled);
        // eval indices are dense and 1-based
        for (i, rec) in result.history.iter().enumerate() {
            assert_eq!(rec.eval_index, i as u64 + 1);
        }
    }

    #[test]
    fn budget_cutoff_mid_step_is_exact() {
        // init 5, offspring 5, budget 7: the first step can only afford 2
        let refs = reference(&["CCO", "CCN", "CCC", "CC(C)C", "c1ccccc1"]);
        let config = small_config(5, 5, 7, 3);
        let oracle = ConstantOracle::new(0.0f64);
        let result = run(&config, &oracle, &refs).unwrap();
        assert_eq!(result.history.len(), 7);
    }

    #[test]
    fn same_seed_reproduces_history() {
        let refs = reference(&["CCO", "CCN", "CCC", "CC(C)C", "c1ccccc1", "C1CCCCC1"]);
        let config = small_config(6, 5, 80, 11);
        let target = parse("CCOC(=O)C").unwrap();
        let oracle = SimilarityOracle::new("t", &target).unwrap();
        let a: RunResult<f64> = run(&config, &oracle, &refs).unwrap();
        let b: RunResult<f64> = run(&config, &oracle, &refs).unwrap();
        let ja = serde_json::to_string(&a.history).unwrap();
        let jb = serde_json::to_string(&b.history).unwrap();
        assert_eq!(ja, jb);

        let other: RunResult<f64> = run(
            &GaConfig {
                seed: 12,
                ..config.clone()
            },
            &oracle,
            &refs,
        )
        .unwrap();
        let jc = serde_json::to_string(&other.history).unwrap();
        assert_ne!(ja, jc);
    }

    #[test]
    fn parallel_scoring_matches_serial() {
        let refs = reference(&["CCO", "CCN", "CCC", "CC(C)C", "c1ccccc1", "C1CCCCC1"]);
        let target = parse("CCOC(=O)C").unwrap();
        let oracle = SimilarityOracle::new("t", &target).unwrap();
        let serial: RunResult<f64> = run(&small_config(6, 5, 120, 5), &oracle, &refs).unwrap();
        let threaded: RunResult<f64> = run(
            &GaConfig {
                threads: 4,
                ..small_config(6, 5, 120, 5)
            },
            &oracle,
            &refs,
        )
        .unwrap();
        let js = serde_json::to_string(&serial.history).unwrap();
        let jt = serde_json::to_string(&threaded.history).unwrap();
        assert_eq!(js, jt);
    }

    #[test]
    fn elitism_is_monotone() {
        let refs = reference(&["CCO", "CCN", "CCC", "CC(C)C", "c1ccccc1"]);
        let config = small_config(5, 5, 150, 23);
        let target = parse("CC(=O)OC").unwrap();
        let oracle = SimilarityOracle::new("t", &target).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut ledger = BudgetLedger::new(config.budget);
        let mut stats = OpStats::default();
        let mut pop: Population<f64> =
            init_population(&refs, &oracle, &config, &mut ledger, &mut rng).unwrap();
        let mut best = pop.best().unwrap().score;
        while !ledger.is_exhausted() {
            step(&mut pop, &oracle, &config, &mut ledger, &mut rng, &mut stats).unwrap();
            let now = pop.best().unwrap().score;
            assert!(now >= best);
            best = now;
        }
    }

    #[test]
    fn stalls_when_supply_is_exhausted() {
        // deletion-only edits on methane/ethane reach exactly two distinct
        // molecules, so the run must stall rather than loop forever
        let refs = reference(&["C", "CC"]);
        let mut config = small_config(2, 5, 100, 2);
        config.operator_weights = OperatorWeights {
            atom_insert: 0.0,
            atom_delete: 1.0,
            element_substitute: 0.0,
            bond_order_change: 0.0,
            ring_add: 0.0,
            ring_delete: 0.0,
        };
        config.mix.crossover_prob = 0.0;
        config.stall_steps = 20;
        let oracle = ConstantOracle::new(0.5f64);
        let result = run(&config, &oracle, &refs).unwrap();
        assert!(result.stalled);
        assert_eq!(result.history.len(), 2);
        assert!(result.history.len() <= 100);
    }

    #[test]
    fn duplicate_offspring_change_nothing() {
        let refs = reference(&["C", "CC"]);
        let mut config = small_config(2, 4, 50, 9);
        config.operator_weights = OperatorWeights {
            atom_insert: 0.0,
            atom_delete: 1.0,
            element_substitute: 0.0,
            bond_order_change: 0.0,
            ring_add: 0.0,
            ring_delete: 0.0,
        };
        config.mix.crossover_prob = 0.0;
        let oracle = ConstantOracle::new(0.5f64);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut ledger = BudgetLedger::new(config.budget);
        let mut stats = OpStats::default();
        let mut pop: Population<f64> =
            init_population(&refs, &oracle, &config, &mut ledger, &mut rng).unwrap();
        let used_after_init = ledger.used();
        // first step may discover methane-from-ethane; afterwards all
        // offspring are duplicates and the ledger must freeze
        let mut last_used = used_after_init;
        for _ in 0..10 {
            step(&mut pop, &oracle, &config, &mut ledger, &mut rng, &mut stats).unwrap();
            assert!(ledger.used() >= last_used);
            last_used = ledger.used();
        }
        assert_eq!(ledger.used(), 2);
        assert_eq!(pop.len(), 2);
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        assert!(GaConfig {
            population_size: 1,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            offspring_size: 0,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            population_size: 200,
            budget: 100,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn f32_engine_smoke() {
        let refs = reference(&["CCO", "CCN", "CCC"]);
        let config = small_config(3, 2, 20, 4);
        let oracle = ConstantOracle::new(0.25f32);
        let result = run(&config, &oracle, &refs).unwrap();
        assert_eq!(result.history.len(), 20);
    }

    #[test]
    fn free_init_skips_budget() {
        let refs = reference(&["CCO", "CCN", "CCC"]);
        let mut config = small_config(3, 2, 10, 4);
        config.init_counts_budget = false;
        let oracle = ConstantOracle::new(0.25f64);
        let result = run(&config, &oracle, &refs).unwrap();
        // all ten evals are offspring, none of them init
        assert_eq!(result.history.len(), 10);
        assert!(result.history.iter().all(|r| r.operator != "init"));
    }
}
