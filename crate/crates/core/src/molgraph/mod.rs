//! Molecular graph data model: atoms, bonds, valence rules, implicit
//! hydrogens, molecular formulas and canonical forms.
//!
//! A [`MolGraph`] is an immutable value after construction. Structural
//! soundness (index bounds, duplicate bonds, size cap) is enforced at
//! construction; chemical validity is a separate question answered by
//! [`MolGraph::check_valence`] so that invalid molecules can still be
//! represented and inspected.

mod canon;
mod element;
mod formula;

pub use canon::CanonicalForm;
pub use element::{Element, ELEMENTS};
pub use formula::Formula;

use crate::error::{Error, Result};

/// Hard cap on heavy-atom count, shared by the parser and all operators.
pub const MAX_HEAVY_ATOMS: usize = 120;

/// Hydrogen count attached to an atom.
///
/// `Implicit` atoms are filled up to the smallest allowed valence;
/// `Explicit` atoms (bracket atoms in SMILES) carry exactly the stated
/// count and never gain implicit hydrogens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HCount {
    Implicit,
    Explicit(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    pub hydrogens: HCount,
    /// Set by the parser on lowercase atoms, resolved away by kekulization.
    pub aromatic: bool,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            charge: 0,
            hydrogens: HCount::Implicit,
            aromatic: false,
        }
    }

    pub fn with_charge(mut self, charge: i8) -> Atom {
        self.charge = charge;
        self
    }

    pub fn with_explicit_h(mut self, h: u8) -> Atom {
        self.hydrogens = HCount::Explicit(h);
        self
    }

    pub fn aromatic(mut self) -> Atom {
        self.aromatic = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
}

impl BondOrder {
    pub fn as_u32(&self) -> u32 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    /// SMILES bond symbol; single bonds are implicit.
    pub fn symbol(&self) -> &'static str {
        match self {
            BondOrder::Single => "",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Bond {
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Attributed undirected molecular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbor index, bond index), sorted by neighbor index.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolGraph {
    /// Builds a graph, enforcing structural invariants only: at least one
    /// atom, at most [`MAX_HEAVY_ATOMS`], charges in range, bond endpoints
    /// distinct and in bounds, at most one bond per atom pair.
    pub fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<MolGraph> {
        if atoms.is_empty() {
            return Err(Error::Structure("molecule has no atoms".into()));
        }
        if atoms.len() > MAX_HEAVY_ATOMS {
            return Err(Error::TooLarge);
        }
        for atom in &atoms {
            element::check_charge(atom.charge)?;
            if atom.aromatic && !atom.element.supports_aromatic() {
                return Err(Error::Structure(format!(
                    "element {} cannot be aromatic",
                    atom.element
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (idx, bond) in bonds.iter().enumerate() {
            if bond.a >= atoms.len() || bond.b >= atoms.len() {
                return Err(Error::Structure(format!(
                    "bond {}-{} out of range",
                    bond.a, bond.b
                )));
            }
            if bond.a == bond.b {
                return Err(Error::Structure(format!("self-bond on atom {}", bond.a)));
            }
            if adjacency[bond.a].iter().any(|&(n, _)| n == bond.b) {
                return Err(Error::Structure(format!(
                    "duplicate bond between atoms {} and {}",
                    bond.a, bond.b
                )));
            }
            adjacency[bond.a].push((bond.b, idx));
            adjacency[bond.b].push((bond.a, idx));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(MolGraph {
            atoms,
            bonds,
            adjacency,
        })
    }

    /// Builds a graph and requires full chemical validity: kekulized,
    /// valence-satisfied and connected. This is the constructor genetic
    /// operators and the parser use for their outputs.
    pub fn assemble(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<MolGraph> {
        let g = MolGraph::from_parts(atoms, bonds)?;
        g.validate()?;
        Ok(g)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, idx: usize) -> &Atom {
        &self.atoms[idx]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, idx: usize) -> &Bond {
        &self.bonds[idx]
    }

    /// (neighbor, bond index) pairs, sorted by neighbor index.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, idx)| &self.bonds[idx])
    }

    /// Sum of bond orders incident to an atom.
    pub fn bond_order_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, bidx)| self.bonds[bidx].order.as_u32())
            .sum()
    }

    /// Implicit hydrogen count for one atom.
    ///
    /// Implicit-count atoms are filled up to the smallest allowed valence
    /// that accommodates their bond order sum; explicit-count atoms always
    /// report zero. Fails when no allowed valence accommodates the bonds.
    pub fn implicit_hydrogens(&self, atom: usize) -> Result<u32> {
        let a = &self.atoms[atom];
        if a.aromatic {
            return Err(Error::InvalidMolecule(format!(
                "atom {atom} has an unresolved aromatic flag"
            )));
        }
        let sum = self.bond_order_sum(atom);
        match a.hydrogens {
            HCount::Explicit(_) => Ok(0),
            HCount::Implicit => match a.element.fill_valence(a.charge, sum) {
                Some(v) => Ok(v - sum),
                None => Err(Error::ValenceViolation {
                    atom,
                    msg: format!(
                        "{} (charge {:+}) cannot carry bond order sum {}",
                        a.element, a.charge, sum
                    ),
                }),
            },
        }
    }

    /// Total hydrogen count (explicit or implicit fill).
    pub fn total_hydrogens(&self, atom: usize) -> Result<u32> {
        match self.atoms[atom].hydrogens {
            HCount::Explicit(h) => Ok(u32::from(h)),
            HCount::Implicit => self.implicit_hydrogens(atom),
        }
    }

    fn atom_valence_ok(&self, atom: usize) -> bool {
        let a = &self.atoms[atom];
        if a.aromatic {
            return false;
        }
        let sum = self.bond_order_sum(atom);
        match a.hydrogens {
            HCount::Implicit => a.element.fill_valence(a.charge, sum).is_some(),
            HCount::Explicit(h) => a
                .element
                .allowed_valences(a.charge)
                .contains(&(sum + u32::from(h))),
        }
    }

    /// Verdict: does every atom satisfy the valence rules? Never fails.
    pub fn check_valence(&self) -> bool {
        (0..self.atoms.len()).all(|i| self.atom_valence_ok(i))
    }

    /// Like [`check_valence`](Self::check_valence) but reports the first
    /// offending atom, and additionally requires connectivity.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.atoms.len() {
            if !self.atom_valence_ok(i) {
                let a = &self.atoms[i];
                let detail = if a.aromatic {
                    "unresolved aromatic flag".to_string()
                } else {
                    format!(
                        "{} (charge {:+}) with bond order sum {} and hydrogens {:?}",
                        a.element,
                        a.charge,
                        self.bond_order_sum(i),
                        a.hydrogens
                    )
                };
                return Err(Error::ValenceViolation { atom: i, msg: detail });
            }
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(n, _) in &self.adjacency[v] {
                if !seen[n] {
                    seen[n] = true;
                    count += 1;
                    stack.push(n);
                }
            }
        }
        count == self.atoms.len()
    }

    /// Indices of bridge bonds (bonds whose removal disconnects the graph).
    /// Every non-bridge bond lies on a cycle.
    pub fn bridges(&self) -> Vec<usize> {
        let n = self.atoms.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridges = Vec::new();
        let mut timer = 0usize;
        // Iterative DFS: (vertex, incoming bond, next neighbor position).
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, usize::MAX, 0));
            while let Some(&mut (v, in_bond, ref mut pos)) = stack.last_mut() {
                if *pos < self.adjacency[v].len() {
                    let (n_idx, b_idx) = self.adjacency[v][*pos];
                    *pos += 1;
                    if b_idx == in_bond {
                        continue;
                    }
                    if disc[n_idx] == usize::MAX {
                        disc[n_idx] = timer;
                        low[n_idx] = timer;
                        timer += 1;
                        stack.push((n_idx, b_idx, 0));
                    } else {
                        low[v] = low[v].min(disc[n_idx]);
                    }
                } else {
                    stack.pop();
                    if let Some(&mut (parent, _, _)) = stack.last_mut() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            bridges.push(in_bond);
                        }
                    }
                }
            }
        }
        bridges.sort_unstable();
        bridges
    }

    /// BFS distance in bonds between two atoms, if connected.
    pub fn distance(&self, from: usize, to: usize) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.atoms.len()];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(n, _) in &self.adjacency[v] {
                if dist[n] == usize::MAX {
                    dist[n] = dist[v] + 1;
                    if n == to {
                        return Some(dist[n]);
                    }
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Element-to-count map including implicit and explicit hydrogens.
    pub fn molecular_formula(&self) -> Result<Formula> {
        let mut formula = Formula::new();
        for i in 0..self.atoms.len() {
            formula.add(self.atoms[i].element.symbol(), 1);
            formula.add("H", self.total_hydrogens(i)?);
        }
        Ok(formula)
    }

    /// Permutation-invariant canonical form. Requires a valid molecule.
    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        canon::canonical_form(self)
    }

    /// Relabels atoms so that old index `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<MolGraph> {
        if perm.len() != self.atoms.len() {
            return Err(Error::Structure("permutation length mismatch".into()));
        }
        let mut atoms = vec![None; self.atoms.len()];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.atoms.len() || atoms[p].is_some() {
                return Err(Error::Structure("not a permutation".into()));
            }
            atoms[p] = Some(self.atoms[i]);
        }
        let atoms = atoms.into_iter().map(|a| a.unwrap()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond::new(perm[b.a], perm[b.b], b.order))
            .collect();
        MolGraph::from_parts(atoms, bonds)
    }
}
