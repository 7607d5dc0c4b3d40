//! Regenerates the bundled desk-scale reference set (data/reference_1k.smi).
//!
//! Starting from a hand-picked list of common drug-like scaffolds, the set
//! is expanded with seeded random mutation walks. Every kept molecule is
//! unique by canonical form, sized 8..=40 heavy atoms, and no two kept
//! molecules differ by a single terminal-atom insertion or deletion; that
//! spacing keeps the AddCarbon baseline's novelty exact on this set.
//!
//! Usage: cargo run --release -p molga --example make_dataset

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use molga::genops::{self, OperatorWeights};
use molga::molgraph::{Atom, Bond, BondOrder, Element, MolGraph};
use molga::smiles;

const SEEDS: &[&str] = &[
    "CC(=O)Oc1ccccc1C(=O)O",
    "CC(=O)Nc1ccc(O)cc1",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CN1CCCC1c1cccnc1",
    "CCOC(=O)c1ccc(N)cc1",
    "OC(=O)c1ccccc1O",
    "COc1cc(C=O)ccc1O",
    "COc1ccc2cc(ccc2c1)C(C)C(=O)O",
    "NC(=O)c1ccccc1",
    "CNCC(O)c1cccc(O)c1",
    "CC(N)Cc1ccccc1",
    "CNC(C)C(O)c1ccccc1",
    "NCCc1ccc(O)cc1",
    "NC(Cc1ccc(O)c(O)c1)C(=O)O",
    "NCCc1c[nH]c2ccccc12",
    "OC(=O)Cc1ccc(cc1)c1ccccc1",
    "CCN(CC)CC(=O)Nc1c(C)cccc1C",
    "CCN(CC)CCOC(=O)c1ccc(N)cc1",
    "CC(C)NCC(O)COc1ccc(CC(N)=O)cc1",
    "CC(C)NCC(O)COc1cccc2ccccc12",
    "COc1cc(CCN)cc(OC)c1OC",
    "Cc1ccc(C(C)C)c(O)c1",
    "COc1cc(CC=C)ccc1O",
    "O=CC=Cc1ccccc1",
    "O=C1C=Cc2ccccc2O1",
    "O=C1NS(=O)(=O)c2ccccc12",
    "CN(C)CCC(c1ccc(Cl)cc1)c1ccccn1",
    "CN(C)CCOC(c1ccccc1)c1ccccc1",
    "CCCCNC(=O)NS(=O)(=O)c1ccc(C)cc1",
    "CCOc1ccc(NC(C)=O)cc1",
    "NS(=O)(=O)c1ccc(N)cc1",
    "Nc1nc2ccccc2s1",
    "COc1ccc2[nH]cc(CCNC(C)=O)c2c1",
    "Clc1ccccc1C(=O)Nc1ccncc1",
    "OCC(O)COc1ccccc1",
    "CC(C)(C)NCC(O)c1ccc(O)c(CO)c1",
    "Oc1ccc(Cl)cc1Cc1cc(Cl)ccc1O",
    "CC(=O)c1ccc(OC(C)=O)cc1",
    "Fc1ccc(cc1)C(=O)CCCN1CCC(O)CC1",
    "Brc1ccc(cc1)S(=O)(=O)NCC1CC1",
    "O=C(O)c1cc(I)ccc1N",
    "CSc1ccc(CC(C)N)cc1",
    "CC1CCCCN1CCCOC(=O)c1ccccc1",
    "Nc1ccc(cc1)C(=O)NCC(=O)O",
    "O=C1CCCc2ccccc21",
    "CC(O)c1ccc(O)c(C=O)c1",
    "OCc1ccc(cc1)c1ccc(CO)cc1",
    "CCOC(=O)N1CCN(CC1)C(=O)c1ccco1",
    "Cc1ccsc1C(=O)NCCN",
    "OC(=O)CCc1n[nH]c(=O)n1C",
    "CC(C)OC(=O)c1cnc(N)nc1",
    "OB(O)c1ccccc1",
    "CC(=O)NC1CCC(CC1)C(=O)O",
    "CC1(C)OC(=O)NC1=O",
    "CNC(=O)Oc1ccccc1OC(C)C",
    "COP(=O)(OC)Oc1ccc(cc1)[N+](=O)[O-]",
    "CC(C)(C)c1ccc(O)cc1",
    "C1CCC2(CC1)OCCO2",
];

const TARGET_COUNT: usize = 1000;
const MIN_HEAVY: usize = 8;
const MAX_HEAVY: usize = 40;
const WALK_EDITS: usize = 4;
const DATASET_SEED: u64 = 20240801;

fn canonical(g: &MolGraph) -> String {
    g.canonical_form().expect("valid molecule").into_string()
}

/// Canonical forms of every molecule reachable from `g` by attaching one
/// terminal atom (any element the site accepts would be caught by the
/// carbon case for insertion symmetry; carbon is what the operators add)
/// or by deleting one terminal atom.
fn single_terminal_neighbors(g: &MolGraph) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for site in 0..g.atom_count() {
        let mut atoms = g.atoms().to_vec();
        let mut bonds = g.bonds().to_vec();
        atoms.push(Atom::new(Element::C));
        bonds.push(Bond::new(site, atoms.len() - 1, BondOrder::Single));
        if let Ok(bigger) = MolGraph::assemble(atoms, bonds) {
            out.insert(canonical(&bigger));
        }
    }
    if g.atom_count() >= 2 {
        for victim in 0..g.atom_count() {
            if g.degree(victim) != 1 {
                continue;
            }
            let mut atoms = Vec::new();
            let mut remap = vec![usize::MAX; g.atom_count()];
            for (i, a) in g.atoms().iter().enumerate() {
                if i != victim {
                    remap[i] = atoms.len();
                    atoms.push(*a);
                }
            }
            let bonds = g
                .bonds()
                .iter()
                .filter(|b| b.a != victim && b.b != victim)
                .map(|b| Bond::new(remap[b.a], remap[b.b], b.order))
                .collect();
            if let Ok(smaller) = MolGraph::assemble(atoms, bonds) {
                out.insert(canonical(&smaller));
            }
        }
    }
    out
}

/// Drug-like ring profile: at most four rings, and fused/spiro junctions
/// limited to what common scaffolds show (naphthalenes, indoles, one spiro
/// center). Unconstrained mutation walks otherwise drift into dense
/// polycyclic cages no screening library would contain.
fn drug_like_rings(g: &MolGraph) -> bool {
    let rings = g.bonds().len() + 1 - g.atom_count();
    if rings > 4 {
        return false;
    }
    let mut cyclic_degree = vec![0usize; g.atom_count()];
    let bridges: std::collections::BTreeSet<usize> = g.bridges().into_iter().collect();
    for (idx, bond) in g.bonds().iter().enumerate() {
        if !bridges.contains(&idx) {
            cyclic_degree[bond.a] += 1;
            cyclic_degree[bond.b] += 1;
        }
    }
    let fusion: usize = cyclic_degree.iter().map(|&d| d.saturating_sub(2)).sum();
    fusion <= 2
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(DATASET_SEED);
    let weights = OperatorWeights::default();

    let mut kept: Vec<(MolGraph, String)> = Vec::new();
    let mut kept_set: BTreeSet<String> = BTreeSet::new();

    let mut admit = |g: MolGraph, kept: &mut Vec<(MolGraph, String)>, kept_set: &mut BTreeSet<String>| -> bool {
        if !(MIN_HEAVY..=MAX_HEAVY).contains(&g.atom_count()) {
            return false;
        }
        if !drug_like_rings(&g) {
            return false;
        }
        let c = canonical(&g);
        if kept_set.contains(&c) {
            return false;
        }
        if single_terminal_neighbors(&g)
            .iter()
            .any(|n| kept_set.contains(n))
        {
            return false;
        }
        kept_set.insert(c.clone());
        kept.push((g, c));
        true
    };

    for seed in SEEDS {
        let g = smiles::parse(seed).unwrap_or_else(|e| panic!("seed {seed:?}: {e}"));
        if !admit(g, &mut kept, &mut kept_set) {
            panic!("seed {seed:?} rejected by dataset filters");
        }
    }

    while kept.len() < TARGET_COUNT {
        let (parent, _) = kept.choose(&mut rng).expect("seeds admitted").clone();
        let mut walker = parent;
        for _ in 0..WALK_EDITS {
            walker = genops::mutate(&walker, &weights, &mut rng).graph;
        }
        admit(walker, &mut kept, &mut kept_set);
    }

    let mut text = String::new();
    text.push_str("# Desk-scale drug-like reference set: ");
    text.push_str(&format!("{TARGET_COUNT} molecules.\n"));
    text.push_str("# Generated with molga's own operators from common scaffolds\n");
    text.push_str(&format!(
        "# (examples/make_dataset.rs, seed {DATASET_SEED}); regenerating reproduces this file.\n"
    ));
    for (_, c) in &kept {
        text.push_str(c);
        text.push('\n');
    }
    std::fs::write("data/reference_1k.smi", text).expect("write data/reference_1k.smi");
    eprintln!("wrote data/reference_1k.smi ({} molecules)", kept.len());
}
