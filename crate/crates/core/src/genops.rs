//! Mutation and crossover operators over molecular graphs, plus the
//! add-carbon baseline perturbation.
//!
//! Every operator output is a valid, connected molecule within the size
//! cap; infeasible or invalid edit attempts are retried up to
//! [`MAX_EDIT_ATTEMPTS`] times and then degrade to the identity (mutation)
//! or to a mutation of the first parent (crossover). Fallbacks are counted
//! in [`OpStats`], never surfaced as errors.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::{Atom, Bond, BondOrder, CanonicalForm, Element, MolGraph};

/// Bounded retries per offspring before the identity/fallback path.
pub const MAX_EDIT_ATTEMPTS: u32 = 20;

/// The mutation edit set.
///
/// Atom insertion appends a terminal carbon; heteroatoms enter through
/// element substitution. New ring bonds close rings of size 3 to 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditKind {
    AtomInsert,
    AtomDelete,
    ElementSubstitute,
    BondOrderChange,
    RingAdd,
    RingDelete,
}

pub const EDIT_KINDS: [EditKind; 6] = [
    EditKind::AtomInsert,
    EditKind::AtomDelete,
    EditKind::ElementSubstitute,
    EditKind::BondOrderChange,
    EditKind::RingAdd,
    EditKind::RingDelete,
];

/// Sampling weights for the edit kinds. The defaults are the declared
/// operator table for this engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorWeights {
    pub atom_insert: f64,
    pub atom_delete: f64,
    pub element_substitute: f64,
    pub bond_order_change: f64,
    pub ring_add: f64,
    pub ring_delete: f64,
}

impl Default for OperatorWeights {
    fn default() -> OperatorWeights {
        OperatorWeights {
            atom_insert: 0.25,
            atom_delete: 0.15,
            element_substitute: 0.25,
            bond_order_change: 0.20,
            ring_add: 0.075,
            ring_delete: 0.075,
        }
    }
}

impl OperatorWeights {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.atom_insert,
            self.atom_delete,
            self.element_substitute,
            self.bond_order_change,
            self.ring_add,
            self.ring_delete,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let arr = self.as_array();
        if arr.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("operator weights must be nonnegative".into()));
        }
        if arr.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("operator weights must not all be zero".into()));
        }
        Ok(())
    }
}

/// How crossover picks the retained side of a cut bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentBias {
    /// Either side with equal probability.
    #[default]
    Uniform,
    /// Sides weighted by atom count; large fragments are kept more often,
    /// which suppresses the flood of tiny duplicate products.
    Size,
}

/// Crossover/mutation mix when producing one offspring: crossover of two
/// parents with `crossover_prob`, then mutation of the child with
/// `mutate_child_prob`; otherwise a single mutation of the first parent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixConfig {
    pub crossover_prob: f64,
    pub mutate_child_prob: f64,
    pub fragment_bias: FragmentBias,
}

impl Default for MixConfig {
    fn default() -> MixConfig {
        MixConfig {
            crossover_prob: 0.5,
            mutate_child_prob: 0.5,
            fragment_bias: FragmentBias::Uniform,
        }
    }
}

impl MixConfig {
    pub fn validate(&self) -> Result<()> {
        for p in [self.crossover_prob, self.mutate_child_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("mix probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Fallback counters accumulated over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpStats {
    pub mutate_identity_fallbacks: u64,
    pub crossover_fallbacks: u64,
}

#[derive(Debug, Clone)]
pub struct MutationOutcome {
    pub graph: MolGraph,
    /// `None` when every attempt was infeasible and the parent was returned.
    pub edit: Option<EditKind>,
    pub attempts: u32,
}

#[derive(Debug, Clone)]
pub struct CrossoverOutcome {
    pub graph: MolGraph,
    pub fell_back: bool,
    pub attempts: u32,
}

/// Applies one randomly chosen edit to a copy of `parent`.
pub fn mutate<R: Rng>(
    parent: &MolGraph,
    weights: &OperatorWeights,
    rng: &mut R,
) -> MutationOutcome {
    let dist = match WeightedIndex::new(weights.as_array()) {
        Ok(d) => d,
        Err(_) => {
            return MutationOutcome {
                graph: parent.clone(),
                edit: None,
                attempts: 0,
            }
        }
    };
    for attempt in 1..=MAX_EDIT_ATTEMPTS {
        let kind = EDIT_KINDS[dist.sample(rng)];
        if let Some(graph) = try_edit(parent, kind, rng) {
            return MutationOutcome {
                graph,
                edit: Some(kind),
                attempts: attempt,
            };
        }
    }
    MutationOutcome {
        graph: parent.clone(),
        edit: None,
        attempts: MAX_EDIT_ATTEMPTS,
    }
}

/// Recombines two parents by cutting a non-ring single bond in each and
/// joining one retained fragment from either side with a new single bond.
/// A parent may also contribute itself whole, attached at a free valence.
/// Falls back to `mutate(parent_a)` when either parent has no non-ring
/// single bond or no attempt produces a valid molecule.
pub fn crossover<R: Rng>(
    parent_a: &MolGraph,
    parent_b: &MolGraph,
    weights: &OperatorWeights,
    bias: FragmentBias,
    rng: &mut R,
) -> CrossoverOutcome {
    let fallback = |rng: &mut R, attempts| {
        let m = mutate(parent_a, weights, rng);
        CrossoverOutcome {
            graph: m.graph,
            fell_back: true,
            attempts,
        }
    };
    if parent_a.atom_count() < 2 || parent_b.atom_count() < 2 {
        return fallback(rng, 0);
    }
    let sites_a = cut_sites(parent_a);
    let sites_b = cut_sites(parent_b);
    if sites_a.is_empty() || sites_b.is_empty() {
        return fallback(rng, 0);
    }
    for attempt in 1..=MAX_EDIT_ATTEMPTS {
        let frag_a = match cut_fragment(parent_a, &sites_a, bias, rng) {
            Some(f) => f,
            None => continue,
        };
        let frag_b = match cut_fragment(parent_b, &sites_b, bias, rng) {
            Some(f) => f,
            None => continue,
        };
        let mut atoms = frag_a.atoms;
        let mut bonds = frag_a.bonds;
        let offset = atoms.len();
        atoms.extend(frag_b.atoms);
        bonds.extend(
            frag_b
                .bonds
                .iter()
                .map(|b| Bond::new(b.a + offset, b.b + offset, b.order)),
        );
        bonds.push(Bond::new(
            frag_a.attachment,
            frag_b.attachment + offset,
            BondOrder::Single,
        ));
        if let Ok(graph) = MolGraph::assemble(atoms, bonds) {
            return CrossoverOutcome {
                graph,
                fell_back: false,
                attempts: attempt,
            };
        }
    }
    fallback(rng, MAX_EDIT_ATTEMPTS)
}

/// Attaches one carbon by a single bond to a uniformly chosen atom with at
/// least one implicit hydrogen.
pub fn add_carbon<R: Rng>(reference: &MolGraph, rng: &mut R) -> Result<MolGraph> {
    let sites: Vec<usize> = (0..reference.atom_count())
        .filter(|&i| reference.implicit_hydrogens(i).map_or(false, |h| h >= 1))
        .collect();
    let site = *sites.choose(rng).ok_or(Error::NoFreeValence)?;
    let mut atoms = reference.atoms().to_vec();
    let mut bonds = reference.bonds().to_vec();
    let new_idx = atoms.len();
    atoms.push(Atom::new(Element::C));
    bonds.push(Bond::new(site, new_idx, BondOrder::Single));
    MolGraph::assemble(atoms, bonds)
}

/// Provenance operator label for one offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Init,
    Mutate,
    Crossover,
    CrossoverMutate,
    AddCarbon,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Init => "init",
            OperatorKind::Mutate => "mutate",
            OperatorKind::Crossover => "crossover",
            OperatorKind::CrossoverMutate => "crossover+mutate",
            OperatorKind::AddCarbon => "addcarbon",
        }
    }
}

/// One generated molecule plus its provenance.
#[derive(Debug, Clone)]
pub struct Offspring {
    pub graph: MolGraph,
    pub operator: OperatorKind,
    pub parents: Vec<CanonicalForm>,
}

/// Produces one offspring from two sampled parents under the mix config.
pub fn spawn_offspring<R: Rng>(
    parent_a: (&MolGraph, &CanonicalForm),
    parent_b: (&MolGraph, &CanonicalForm),
    weights: &OperatorWeights,
    mix: &MixConfig,
    rng: &mut R,
    stats: &mut OpStats,
) -> Offspring {
    if rng.gen_bool(mix.crossover_prob) {
        let xo = crossover(parent_a.0, parent_b.0, weights, mix.fragment_bias, rng);
        let (mut graph, mut operator, parents) = if xo.fell_back {
            stats.crossover_fallbacks += 1;
            (xo.graph, OperatorKind::Mutate, vec![parent_a.1.clone()])
        } else {
            (
                xo.graph,
                OperatorKind::Crossover,
                vec![parent_a.1.clone(), parent_b.1.clone()],
            )
        };
        if rng.gen_bool(mix.mutate_child_prob) {
            let m = mutate(&graph, weights, rng);
            if m.edit.is_none() {
                stats.mutate_identity_fallbacks += 1;
            }
            graph = m.graph;
            if operator == OperatorKind::Crossover {
                operator = OperatorKind::CrossoverMutate;
            }
        }
        Offspring {
            graph,
            operator,
            parents,
        }
    } else {
        let m = mutate(parent_a.0, weights, rng);
        if m.edit.is_none() {
            stats.mutate_identity_fallbacks += 1;
        }
        Offspring {
            graph: m.graph,
            operator: OperatorKind::Mutate,
            parents: vec![parent_a.1.clone()],
        }
    }
}

// ---------------------------------------------------------------------------
// edit application
// ---------------------------------------------------------------------------

/// Can the atom take one more unit of bond order, keeping its hydrogen
/// count rule satisfiable?
fn can_gain_bond(g: &MolGraph, atom: usize) -> bool {
    let a = g.atom(atom);
    let sigma = g.bond_order_sum(atom) + 1;
    match a.hydrogens {
        crate::molgraph::HCount::Implicit => a.element.fill_valence(a.charge, sigma).is_some(),
        crate::molgraph::HCount::Explicit(h) => a
            .element
            .allowed_valences(a.charge)
            .contains(&(sigma + u32::from(h))),
    }
}

fn try_edit<R: Rng>(parent: &MolGraph, kind: EditKind, rng: &mut R) -> Option<MolGraph> {
    match kind {
        EditKind::AtomInsert => {
            let sites: Vec<usize> =
                (0..parent.atom_count()).filter(|&i| can_gain_bond(parent, i)).collect();
            let site = *sites.choose(rng)?;
            let mut atoms = parent.atoms().to_vec();
            let mut bonds = parent.bonds().to_vec();
            atoms.push(Atom::new(Element::C));
            bonds.push(Bond::new(site, atoms.len() - 1, BondOrder::Single));
            MolGraph::assemble(atoms, bonds).ok()
        }
        EditKind::AtomDelete => {
            if parent.atom_count() < 2 {
                return None;
            }
            let sites: Vec<usize> =
                (0..parent.atom_count()).filter(|&i| parent.degree(i) == 1).collect();
            let victim = *sites.choose(rng)?;
            let mut atoms = Vec::with_capacity(parent.atom_count() - 1);
            let mut remap = vec![usize::MAX; parent.atom_count()];
            for (i, a) in parent.atoms().iter().enumerate() {
                if i != victim {
                    remap[i] = atoms.len();
                    atoms.push(*a);
                }
            }
            let bonds = parent
                .bonds()
                .iter()
                .filter(|b| b.a != victim && b.b != victim)
                .map(|b| Bond::new(remap[b.a], remap[b.b], b.order))
                .collect();
            MolGraph::assemble(atoms, bonds).ok()
        }
        EditKind::ElementSubstitute => {
            let mut candidates: Vec<(usize, Element)> = Vec::new();
            for i in 0..parent.atom_count() {
                let a = parent.atom(i);
                let sigma = parent.bond_order_sum(i);
                for &e in &crate::molgraph::ELEMENTS {
                    if e != a.element && e.fill_valence(a.charge, sigma).is_some() {
                        candidates.push((i, e));
                    }
                }
            }
            let &(site, element) = candidates.choose(rng)?;
            let mut atoms = parent.atoms().to_vec();
            atoms[site] = Atom::new(element).with_charge(atoms[site].charge);
            MolGraph::assemble(atoms, parent.bonds().to_vec()).ok()
        }
        EditKind::BondOrderChange => {
            let mut candidates: Vec<(usize, i8)> = Vec::new();
            for (idx, bond) in parent.bonds().iter().enumerate() {
                if bond.order != BondOrder::Triple
                    && can_gain_bond(parent, bond.a)
                    && can_gain_bond(parent, bond.b)
                {
                    candidates.push((idx, 1));
                }
                if bond.order != BondOrder::Single {
                    candidates.push((idx, -1));
                }
            }
            let &(idx, delta) = candidates.choose(rng)?;
            let mut bonds = parent.bonds().to_vec();
            bonds[idx].order = match (bonds[idx].order, delta) {
                (BondOrder::Single, 1) => BondOrder::Double,
                (BondOrder::Double, 1) => BondOrder::Triple,
                (BondOrder::Double, -1) => BondOrder::Single,
                (BondOrder::Triple, -1) => BondOrder::Double,
                _ => return None,
            };
            MolGraph::assemble(parent.atoms().to_vec(), bonds).ok()
        }
        EditKind::RingAdd => {
            let mut candidates: Vec<(usize, usize)> = Vec::new();
            for a in 0..parent.atom_count() {
                if !can_gain_bond(parent, a) {
                    continue;
                }
                for b in (a + 1)..parent.atom_count() {
                    if !can_gain_bond(parent, b) || parent.bond_between(a, b).is_some() {
                        continue;
                    }
                    // new bond closes a ring of size distance + 1, kept in 3..=7
                    match parent.distance(a, b) {
                        Some(d) if (2..=6).contains(&d) => candidates.push((a, b)),
                        _ => {}
                    }
                }
            }
            let &(a, b) = candidates.choose(rng)?;
            let mut bonds = parent.bonds().to_vec();
            bonds.push(Bond::new(a, b, BondOrder::Single));
            MolGraph::assemble(parent.atoms().to_vec(), bonds).ok()
        }
        EditKind::RingDelete => {
            let bridges = parent.bridges();
            let candidates: Vec<usize> = (0..parent.bonds().len())
                .filter(|i| !bridges.contains(i))
                .collect();
            let &victim = candidates.choose(rng)?;
            let bonds = parent
                .bonds()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != victim)
                .map(|(_, b)| *b)
                .collect();
            MolGraph::assemble(parent.atoms().to_vec(), bonds).ok()
        }
    }
}

// ---------------------------------------------------------------------------
// crossover fragments
// ---------------------------------------------------------------------------

struct Fragment {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    attachment: usize,
}

/// Non-ring single bonds: the cuttable bond set.
fn cut_sites(g: &MolGraph) -> Vec<usize> {
    g.bridges()
        .into_iter()
        .filter(|&i| g.bond(i).order == BondOrder::Single)
        .collect()
}

/// Cuts one site (uniform over the cuttable bonds plus one whole-molecule
/// pseudo-site) and returns the retained fragment with its attachment atom.
fn cut_fragment<R: Rng>(
    g: &MolGraph,
    sites: &[usize],
    bias: FragmentBias,
    rng: &mut R,
) -> Option<Fragment> {
    let pick = rng.gen_range(0..=sites.len());
    if pick == sites.len() {
        // whole molecule, attached at any atom that can take one more bond
        let anchors: Vec<usize> =
            (0..g.atom_count()).filter(|&i| can_gain_bond(g, i)).collect();
        let attachment = *anchors.choose(rng)?;
        return Some(Fragment {
            atoms: g.atoms().to_vec(),
            bonds: g.bonds().to_vec(),
            attachment,
        });
    }
    let cut = g.bond(sites[pick]);
    // component membership once the cut bond is removed
    let mut side_a = vec![false; g.atom_count()];
    side_a[cut.a] = true;
    let mut stack = vec![cut.a];
    while let Some(v) = stack.pop() {
        for &(n, bidx) in g.neighbors(v) {
            if bidx == sites[pick] || side_a[n] {
                continue;
            }
            side_a[n] = true;
            stack.push(n);
        }
    }
    let size_a = side_a.iter().filter(|&&k| k).count();
    let keep_a_side = match bias {
        FragmentBias::Uniform => rng.gen_bool(0.5),
        FragmentBias::Size => rng.gen_range(0..g.atom_count()) < size_a,
    };
    let keep: Vec<bool> = if keep_a_side {
        side_a
    } else {
        side_a.iter().map(|&k| !k).collect()
    };
    let root = if keep_a_side { cut.a } else { cut.b };
    let mut remap = vec![usize::MAX; g.atom_count()];
    let mut atoms = Vec::new();
    for (i, a) in g.atoms().iter().enumerate() {
        if keep[i] {
            remap[i] = atoms.len();
            atoms.push(*a);
        }
    }
    let bonds = g
        .bonds()
        .iter()
        .filter(|b| keep[b.a] && keep[b.b])
        .map(|b| Bond::new(remap[b.a], remap[b.b], b.order))
        .collect();
    Some(Fragment {
        attachment: remap[root],
        atoms,
        bonds,
    })
}
