use std::time::Instant;
use molga::engine::{self, BudgetLedger, GaConfig, Population};
use molga::genops::OpStats;
use molga::oracles::SimilarityOracle;
use rand::SeedableRng;

fn main() {
    let text = std::fs::read_to_string("data/reference_1k.smi").unwrap();
    let mols = molga::reference::parse_reference(&text).molecules;
    let target = molga::smiles::parse("CC(=O)Oc1ccccc1C(=O)O").unwrap();
    let oracle = SimilarityOracle::new("aspirin", &target).unwrap();
    let config = GaConfig { budget: 300, seed: 0, ..GaConfig::default() };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut ledger: BudgetLedger<f64> = BudgetLedger::new(config.budget);
    let mut stats = OpStats::default();
    let t = Instant::now();
    let mut pop: Population<f64> = engine::init_population(&mols, &oracle, &config, &mut ledger, &mut rng).unwrap();
    eprintln!("init: {:?} ({} members)", t.elapsed(), pop.len());
    for step_no in 0..40 {
        let t = Instant::now();
        engine::step(&mut pop, &oracle, &config, &mut ledger, &mut rng, &mut stats).unwrap();
        eprintln!("step {step_no}: {:?} used={} best={:.4} worst_atoms={}", t.elapsed(), ledger.used(),
            pop.best().unwrap().score,
            pop.ranked().iter().map(|m| m.graph.atom_count()).max().unwrap());
        if ledger.is_exhausted() { break; }
    }
}
