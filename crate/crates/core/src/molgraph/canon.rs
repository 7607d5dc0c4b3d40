//! Canonical serialization of molecular graphs.
//!
//! Small graphs (up to [`EXACT_SEARCH_MAX_ATOMS`] atoms) canonicalize to
//! the lexicographically smallest string among every depth-first SMILES
//! serialization over all atom relabelings, found with a best-first search
//! over partial serializations: a priority queue keyed on the emitted
//! prefix advances the smallest candidates first, branching wherever a
//! serialization choice exists (root atom, branch order, ring-closure
//! placement). The first completed serialization popped from the queue is
//! the global minimum.
//!
//! Larger graphs use iterative neighborhood refinement (element, charge,
//! hydrogen count, bond orders) with systematic individualization of tied
//! atoms; the canonical string is the smallest serialization over the
//! discrete labelings the refinement tree produces. Refinement shatters
//! symmetric ring systems quickly, which keeps dense polycyclic molecules
//! cheap where the exact string search would branch combinatorially.
//!
//! Both routes are permutation invariant by construction and emit the same
//! grammar, so every canonical form is a valid SMILES string that reparses
//! to an isomorphic graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BondOrder, MolGraph};
use crate::error::{Error, Result};

/// Permutation-invariant serialization of a molecule, usable as an identity
/// key for uniqueness and novelty accounting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    #[cfg(test)]
    pub(crate) fn from_test_str(s: &str) -> CanonicalForm {
        CanonicalForm(s.to_string())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

const NO_PARENT: u8 = u8::MAX;
const MAX_RING_DIGIT: u8 = 99;

/// SMILES atom token: bare organic-subset symbol when the atom is neutral
/// and its hydrogen count equals the default implicit fill, bracket form
/// otherwise. Explicit hydrogen counts that match the default fill collapse
/// to the bare form, so equivalent molecules serialize identically.
pub(crate) fn atom_token(g: &MolGraph, idx: usize) -> Result<String> {
    let a = g.atom(idx);
    let sigma = g.bond_order_sum(idx);
    let h = g.total_hydrogens(idx)?;
    let default_fill = a.element.fill_valence(0, sigma).map(|v| v - sigma);
    if a.charge == 0 && default_fill == Some(h) {
        return Ok(a.element.symbol().to_string());
    }
    let h_part = match h {
        0 => String::new(),
        1 => "H".to_string(),
        n => format!("H{n}"),
    };
    let charge_part = match a.charge {
        0 => String::new(),
        1 => "+".to_string(),
        -1 => "-".to_string(),
        q if q > 0 => format!("+{q}"),
        q => format!("-{}", -q),
    };
    Ok(format!("[{}{}{}]", a.element.symbol(), h_part, charge_part))
}

pub(crate) fn ring_digit_text(digit: u8) -> String {
    if digit < 10 {
        digit.to_string()
    } else {
        format!("%{digit:02}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Frame {
    /// Arrive at an atom: emit bond symbol and atom token, then rings and
    /// branch frames.
    Visit { atom: u8, parent: u8, via: u8 },
    /// Fires after all branches of an atom finish; every ring opened at the
    /// atom must have closed inside its subtree by then.
    EndAtom(u8),
    Lit(u8),
}

/// A ring digit emitted at `opener` that has not closed yet. The digit is
/// not yet tied to a specific edge: the next closing at this opener with a
/// matching bond order takes the oldest slot, which enforces the
/// open-in-visit-order grammar without enumerating open orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct OpenSlot {
    opener: u8,
    order: BondOrder,
    digit: u8,
}

#[derive(Clone)]
struct State {
    out: String,
    visited: u128,
    visited_count: u32,
    stack: Vec<Frame>,
    /// Unclosed ring digits in emission order.
    slots: Vec<OpenSlot>,
    digits_used: u128,
}

impl State {
    fn root(atom: usize) -> State {
        State {
            out: String::new(),
            visited: 0,
            visited_count: 0,
            stack: vec![Frame::Visit {
                atom: atom as u8,
                parent: NO_PARENT,
                via: 0,
            }],
            slots: Vec::new(),
            digits_used: 0,
        }
    }

    fn is_visited(&self, atom: usize) -> bool {
        self.visited >> atom & 1 == 1
    }

    fn alloc_digit(&mut self) -> Option<u8> {
        for d in 1..=MAX_RING_DIGIT {
            if self.digits_used >> d & 1 == 0 {
                self.digits_used |= 1 << d;
                return Some(d);
            }
        }
        None
    }

    fn free_digit(&mut self, digit: u8) {
        self.digits_used &= !(1u128 << digit);
    }

}

enum Step {
    Forked(Vec<State>),
    Complete(State),
    Dead,
}

struct Searcher<'a> {
    graph: &'a MolGraph,
    tokens: Vec<String>,
    is_bridge: Vec<bool>,
}

fn bond_from_u8(v: u8) -> Option<BondOrder> {
    match v {
        1 => Some(BondOrder::Single),
        2 => Some(BondOrder::Double),
        3 => Some(BondOrder::Triple),
        _ => None,
    }
}

impl<'a> Searcher<'a> {
    fn new(graph: &'a MolGraph) -> Result<Searcher<'a>> {
        let tokens = (0..graph.atom_count())
            .map(|i| atom_token(graph, i))
            .collect::<Result<Vec<_>>>()?;
        let mut is_bridge = vec![false; graph.bonds().len()];
        for idx in graph.bridges() {
            is_bridge[idx] = true;
        }
        Ok(Searcher {
            graph,
            tokens,
            is_bridge,
        })
    }

    /// Advances a state until it forks, completes, or dies.
    fn advance(&self, mut state: State) -> Step {
        loop {
            let frame = match state.stack.pop() {
                Some(f) => f,
                None => {
                    return if state.visited_count as usize == self.graph.atom_count() {
                        Step::Complete(state)
                    } else {
                        Step::Dead
                    };
                }
            };
            match frame {
                Frame::Lit(c) => state.out.push(c as char),
                Frame::EndAtom(atom) => {
                    if state.slots.iter().any(|s| s.opener == atom) {
                        return Step::Dead;
                    }
                }
                Frame::Visit { atom, parent, via } => {
                    match self.visit(&mut state, atom, parent, bond_from_u8(via)) {
                        VisitOutcome::Continue => {}
                        VisitOutcome::Forked(children) => return Step::Forked(children),
                        VisitOutcome::Dead => return Step::Dead,
                    }
                }
            }
        }
    }

    fn visit(
        &self,
        state: &mut State,
        atom: u8,
        parent: u8,
        via: Option<BondOrder>,
    ) -> VisitOutcome {
        let a = atom as usize;
        if state.is_visited(a) {
            // planned as a tree child but reached through a ring first
            return VisitOutcome::Dead;
        }
        state.visited |= 1 << a;
        state.visited_count += 1;
        if let Some(order) = via {
            state.out.push_str(order.symbol());
        }
        state.out.push_str(&self.tokens[a]);

        // Ring closures: every visited non-parent neighbor must take the
        // oldest unbound slot of its opener, with matching bond order.
        // Closures are emitted oldest slot first (openers in visit order).
        let mut closing: Vec<(usize, usize)> = Vec::new(); // (slot index, neighbor)
        let mut unvisited: Vec<(usize, usize)> = Vec::new();
        for &(nbr, bidx) in self.graph.neighbors(a) {
            if nbr as u8 == parent {
                continue;
            }
            if state.is_visited(nbr) {
                match state.slots.iter().position(|s| s.opener as usize == nbr) {
                    Some(slot) => closing.push((slot, bidx)),
                    // an undeclared back edge cannot be serialized
                    None => return VisitOutcome::Dead,
                }
            } else {
                unvisited.push((nbr, bidx));
            }
        }
        closing.sort_unstable();
        for &(slot, bidx) in &closing {
            if state.slots[slot].order != self.graph.bond(bidx).order {
                return VisitOutcome::Dead;
            }
        }
        for &(slot, _) in &closing {
            let s = state.slots[slot];
            state.out.push_str(s.order.symbol());
            state.out.push_str(&ring_digit_text(s.digit));
            state.free_digit(s.digit);
        }
        let closed: Vec<usize> = closing.iter().map(|&(slot, _)| slot).collect();
        let mut keep = 0usize;
        state.slots.retain(|_| {
            let this = keep;
            keep += 1;
            !closed.contains(&this)
        });

        let choices = self.fork_choices(&unvisited);
        if choices.len() == 1 {
            let (ref opens, ref children) = choices[0];
            if !self.apply_choice(state, atom, opens, children) {
                return VisitOutcome::Dead;
            }
            return VisitOutcome::Continue;
        }
        let mut forks = Vec::with_capacity(choices.len());
        for (opens, children) in &choices {
            let mut child = state.clone();
            if self.apply_choice(&mut child, atom, opens, children) {
                forks.push(child);
            }
        }
        if forks.is_empty() {
            return VisitOutcome::Dead;
        }
        VisitOutcome::Forked(forks)
    }

    /// All (ring-open bond-order sequence, branch order) decompositions of
    /// the unvisited neighbor set. Opens are restricted to cycle bonds (a
    /// bridge can never close a ring) and are chosen as an order-sequence
    /// only: which edge takes which digit is decided at closing time, so
    /// equal-order openings never multiply the fork.
    #[allow(clippy::type_complexity)]
    fn fork_choices(
        &self,
        unvisited: &[(usize, usize)],
    ) -> Vec<(Vec<BondOrder>, Vec<(usize, usize)>)> {
        let mut result = Vec::new();
        let cyclic: Vec<usize> = (0..unvisited.len())
            .filter(|&i| !self.is_bridge[unvisited[i].1])
            .collect();
        // subsets of the cyclic neighbors become ring opens
        for mask in 0..(1u32 << cyclic.len()) {
            let mut open_orders: Vec<BondOrder> = Vec::new();
            let mut taken = vec![false; unvisited.len()];
            for (bit, &i) in cyclic.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    taken[i] = true;
                    open_orders.push(self.graph.bond(unvisited[i].1).order);
                }
            }
            let rest: Vec<(usize, usize)> = unvisited
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(_, &m)| m)
                .collect();
            // distinct emission sequences of the open bond orders
            let mut orders = open_orders.clone();
            orders.sort_unstable();
            let mut sequences: Vec<Vec<BondOrder>> = Vec::new();
            distinct_permutations(&orders, &mut Vec::new(), &mut vec![false; orders.len()], &mut sequences);
            // branch orders
            let mut child_orders: Vec<Vec<(usize, usize)>> = Vec::new();
            distinct_permutations(
                &rest,
                &mut Vec::new(),
                &mut vec![false; rest.len()],
                &mut child_orders,
            );
            for seq in &sequences {
                for children in &child_orders {
                    result.push((seq.clone(), children.clone()));
                }
            }
        }
        result
    }

    fn apply_choice(
        &self,
        state: &mut State,
        atom: u8,
        opens: &[BondOrder],
        children: &[(usize, usize)],
    ) -> bool {
        for &order in opens {
            let digit = match state.alloc_digit() {
                Some(d) => d,
                None => return false,
            };
            state.out.push_str(order.symbol());
            state.out.push_str(&ring_digit_text(digit));
            state.slots.push(OpenSlot {
                opener: atom,
                order,
                digit,
            });
        }
        state.stack.push(Frame::EndAtom(atom));
        for (pos, &(child, bidx)) in children.iter().enumerate().rev() {
            let last = pos + 1 == children.len();
            if !last {
                state.stack.push(Frame::Lit(b')'));
            }
            state.stack.push(Frame::Visit {
                atom: child as u8,
                parent: atom,
                via: self.graph.bond(bidx).order.as_u32() as u8,
            });
            if !last {
                state.stack.push(Frame::Lit(b'('));
            }
        }
        true
    }
}

enum VisitOutcome {
    Continue,
    Forked(Vec<State>),
    Dead,
}

/// Distinct permutations of a slice (duplicates skipped), emitted into
/// `result`.
fn distinct_permutations<T: Copy + PartialEq>(
    items: &[T],
    acc: &mut Vec<T>,
    used: &mut Vec<bool>,
    result: &mut Vec<Vec<T>>,
) {
    if acc.len() == items.len() {
        result.push(acc.clone());
        return;
    }
    let mut tried: Vec<T> = Vec::new();
    for i in 0..items.len() {
        if used[i] || tried.contains(&items[i]) {
            continue;
        }
        tried.push(items[i]);
        used[i] = true;
        acc.push(items[i]);
        distinct_permutations(items, acc, used, result);
        acc.pop();
        used[i] = false;
    }
}

/// Priority-queue entry; smallest emitted prefix first, completed states
/// ahead of active ones with an equal prefix.
struct Entry {
    complete: bool,
    id: u64,
    state: State,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: invert so the smallest prefix pops first
        other
            .state
            .out
            .cmp(&self.state.out)
            .then_with(|| self.complete.cmp(&other.complete))
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Above this atom count the refinement route takes over from the exact
/// minimum-string search.
const EXACT_SEARCH_MAX_ATOMS: usize = 8;

pub(crate) fn canonical_form(g: &MolGraph) -> Result<CanonicalForm> {
    if !g.check_valence() {
        return Err(Error::InvalidMolecule(
            "canonical form requires a valence-valid molecule".into(),
        ));
    }
    if !g.is_connected() {
        return Err(Error::InvalidMolecule(
            "canonical form requires a connected molecule".into(),
        ));
    }
    if g.atom_count() <= EXACT_SEARCH_MAX_ATOMS {
        min_string_search(g)
    } else {
        refined_canonical(g)
    }
}

fn min_string_search(g: &MolGraph) -> Result<CanonicalForm> {
    let searcher = Searcher::new(g)?;
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let mut next_id = 0u64;
    for root in 0..g.atom_count() {
        heap.push(Entry {
            complete: false,
            id: next_id,
            state: State::root(root),
        });
        next_id += 1;
    }
    while let Some(entry) = heap.pop() {
        if entry.complete {
            return Ok(CanonicalForm(entry.state.out));
        }
        match searcher.advance(entry.state) {
            Step::Complete(done) => {
                // not returned directly: an active state with a smaller
                // prefix may still complete below this string
                heap.push(Entry {
                    complete: true,
                    id: next_id,
                    state: done,
                });
                next_id += 1;
            }
            Step::Forked(children) => {
                for child in children {
                    heap.push(Entry {
                        complete: false,
                        id: next_id,
                        state: child,
                    });
                    next_id += 1;
                }
            }
            Step::Dead => {}
        }
    }
    Err(Error::InvalidMolecule("no serialization found".into()))
}


// ---------------------------------------------------------------------------
// refinement route
// ---------------------------------------------------------------------------

/// Canonical string via iterative refinement with individualization of
/// tied atoms. The result is the smallest serialization over the discrete
/// labelings reached by the refinement tree; the tree is explored the same
/// way for every relabeling of the input, so the minimum is permutation
/// invariant.
fn refined_canonical(g: &MolGraph) -> Result<CanonicalForm> {
    let tokens = (0..g.atom_count())
        .map(|i| atom_token(g, i))
        .collect::<Result<Vec<_>>>()?;
    // initial colors: rank atoms by (element, charge, hydrogen count)
    let mut keys: Vec<(u8, i8, u32)> = Vec::with_capacity(g.atom_count());
    for i in 0..g.atom_count() {
        let a = g.atom(i);
        keys.push((a.element as u8, a.charge, g.total_hydrogens(i)?));
    }
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let colors: Vec<u32> = keys
        .iter()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect();
    let mut best: Option<String> = None;
    individualize(g, &tokens, colors, &mut best);
    best.map(CanonicalForm)
        .ok_or_else(|| Error::InvalidMolecule("no serialization found".into()))
}

/// One round of stable 1-dimensional refinement: an atom's new color is the
/// rank of (old color, sorted multiset of (bond order, neighbor color)).
/// Ranks are assigned by sorting, so they depend only on the partition.
fn refine_colors(g: &MolGraph, colors: &mut Vec<u32>) {
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..g.atom_count())
            .map(|i| {
                let mut ns: Vec<(u32, u32)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(n, bidx)| (g.bond(bidx).order.as_u32(), colors[n]))
                    .collect();
                ns.sort_unstable();
                (colors[i], ns)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        let new: Vec<u32> = sigs
            .iter()
            .map(|sig| sorted.binary_search(&sig).expect("sig present") as u32)
            .collect();
        if new == *colors {
            return;
        }
        *colors = new;
    }
}

fn individualize(g: &MolGraph, tokens: &[String], mut colors: Vec<u32>, best: &mut Option<String>) {
    refine_colors(g, &mut colors);
    let mut counts = vec![0u32; g.atom_count()];
    for &c in &colors {
        counts[c as usize] += 1;
    }
    let target = (0..g.atom_count()).find(|&c| counts[c] >= 2);
    match target {
        None => {
            // discrete: colors form a permutation, serialize under it
            let ranks: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
            let s = serialize_with_ranks(g, tokens, &ranks);
            if best.as_ref().map_or(true, |b| s < *b) {
                *best = Some(s);
            }
        }
        Some(cell) => {
            for v in 0..g.atom_count() {
                if colors[v] as usize != cell {
                    continue;
                }
                let mut child: Vec<u32> = colors.iter().map(|&c| c * 2 + 1).collect();
                child[v] -= 1;
                individualize(g, tokens, child, best);
            }
        }
    }
}

/// Deterministic serialization under a discrete atom ranking: the root is
/// rank 0, neighbors are explored in rank order, and ring digits follow the
/// shared grammar (closings in opener visit order, openings in target visit
/// order, lowest free digit first).
fn serialize_with_ranks(g: &MolGraph, tokens: &[String], ranks: &[usize]) -> String {
    let n = g.atom_count();
    let root = (0..n).find(|&i| ranks[i] == 0).expect("rank 0 exists");

    // discovery pass: tree children per atom in visit order, back edges
    let mut by_rank: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            let mut ns: Vec<(usize, usize)> = g.neighbors(i).to_vec();
            ns.sort_by_key(|&(nbr, _)| ranks[nbr]);
            ns
        })
        .collect();
    let mut visit_time = vec![usize::MAX; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut back_edges: Vec<(usize, usize, usize)> = Vec::new(); // (opener, target, bond)
    let mut edge_seen = vec![false; g.bonds().len()];
    let mut timer = 0usize;
    // (atom, incoming bond, neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    visit_time[root] = timer;
    timer += 1;
    while let Some(&mut (v, in_bond, ref mut pos)) = stack.last_mut() {
        if *pos == by_rank[v].len() {
            stack.pop();
            continue;
        }
        let (nbr, bidx) = by_rank[v][*pos];
        *pos += 1;
        if bidx == in_bond || edge_seen[bidx] {
            continue;
        }
        if visit_time[nbr] == usize::MAX {
            edge_seen[bidx] = true;
            visit_time[nbr] = timer;
            timer += 1;
            children[v].push((nbr, bidx));
            stack.push((nbr, bidx, 0));
        } else {
            edge_seen[bidx] = true;
            let (opener, target) = if visit_time[v] < visit_time[nbr] {
                (v, nbr)
            } else {
                (nbr, v)
            };
            back_edges.push((opener, target, bidx));
        }
    }
    drop(by_rank);

    // emission pass
    let mut opens: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // per opener: (target, bond)
    let mut closes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // per target: (opener, bond)
    for &(opener, target, bidx) in &back_edges {
        opens[opener].push((target, bidx));
        closes[target].push((opener, bidx));
    }
    for list in &mut opens {
        list.sort_by_key(|&(target, _)| visit_time[target]);
    }
    for list in &mut closes {
        list.sort_by_key(|&(opener, _)| visit_time[opener]);
    }

    let mut out = String::new();
    let mut digits_used = 0u128;
    let mut digit_of = vec![0u8; g.bonds().len()];
    // frames: atom arrival (with incoming bond) or a literal parenthesis
    enum Emit {
        Atom(usize, Option<BondOrder>),
        Lit(char),
    }
    let mut frames: Vec<Emit> = vec![Emit::Atom(root, None)];
    while let Some(frame) = frames.pop() {
        match frame {
            Emit::Lit(c) => out.push(c),
            Emit::Atom(v, via) => {
                if let Some(order) = via {
                    out.push_str(order.symbol());
                }
                out.push_str(&tokens[v]);
                for &(_, bidx) in &closes[v] {
                    out.push_str(g.bond(bidx).order.symbol());
                    out.push_str(&ring_digit_text(digit_of[bidx]));
                    digits_used &= !(1u128 << digit_of[bidx]);
                }
                for &(_, bidx) in &opens[v] {
                    let digit = (1..=MAX_RING_DIGIT)
                        .find(|d| digits_used >> d & 1 == 0)
                        .expect("ring digit available");
                    digits_used |= 1 << digit;
                    digit_of[bidx] = digit;
                    out.push_str(g.bond(bidx).order.symbol());
                    out.push_str(&ring_digit_text(digit));
                }
                for (pos, &(child, bidx)) in children[v].iter().enumerate().rev() {
                    let last = pos + 1 == children[v].len();
                    if !last {
                        frames.push(Emit::Lit(')'));
                    }
                    frames.push(Emit::Atom(child, Some(g.bond(bidx).order)));
                    if !last {
                        frames.push(Emit::Lit('('));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{Atom, Bond, Element};

    fn chain(elements: &[Element]) -> MolGraph {
        let atoms = elements.iter().map(|&e| Atom::new(e)).collect();
        let bonds = (1..elements.len())
            .map(|i| Bond::new(i - 1, i, BondOrder::Single))
            .collect();
        MolGraph::from_parts(atoms, bonds).unwrap()
    }

    #[test]
    fn methane_is_bare_symbol() {
        let g = chain(&[Element::C]);
        assert_eq!(g.canonical_form().unwrap().as_str(), "C");
    }

    #[test]
    fn ethanol_permutations_agree() {
        let g = chain(&[Element::C, Element::C, Element::O]);
        let canon = g.canonical_form().unwrap();
        for perm in [[0usize, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let p = g.permuted(&perm).unwrap();
            assert_eq!(p.canonical_form().unwrap(), canon);
        }
    }

    #[test]
    fn ring_serializes_with_digit() {
        let g = MolGraph::from_parts(
            vec![Atom::new(Element::C); 3],
            vec![
                Bond::new(0, 1, BondOrder::Single),
                Bond::new(1, 2, BondOrder::Single),
                Bond::new(2, 0, BondOrder::Single),
            ],
        )
        .unwrap();
        assert_eq!(g.canonical_form().unwrap().as_str(), "C1CC1");
    }

    #[test]
    fn charged_atom_uses_brackets() {
        let g = MolGraph::from_parts(
            vec![Atom::new(Element::N).with_charge(1).with_explicit_h(4)],
            vec![],
        )
        .unwrap();
        assert_eq!(g.canonical_form().unwrap().as_str(), "[NH4+]");
    }

    #[test]
    fn explicit_default_h_normalizes_to_bare() {
        let g = MolGraph::from_parts(vec![Atom::new(Element::C).with_explicit_h(4)], vec![])
            .unwrap();
        assert_eq!(g.canonical_form().unwrap().as_str(), "C");
    }

    #[test]
    fn invalid_molecule_rejected() {
        let atoms: Vec<Atom> = vec![Atom::new(Element::C); 6];
        let bonds = (1..6).map(|i| Bond::new(0, i, BondOrder::Single)).collect();
        let g = MolGraph::from_parts(atoms, bonds).unwrap();
        assert!(matches!(
            g.canonical_form(),
            Err(Error::InvalidMolecule(_))
        ));
    }

    #[test]
    fn bond_orders_appear() {
        let g = MolGraph::from_parts(
            vec![Atom::new(Element::C), Atom::new(Element::C)],
            vec![Bond::new(0, 1, BondOrder::Triple)],
        )
        .unwrap();
        assert_eq!(g.canonical_form().unwrap().as_str(), "C#C");
    }

    #[test]
    fn fused_rings_roundtrip_stably() {
        let g = crate::smiles::parse("C1CC2CCC1CC2").unwrap();
        let c1 = g.canonical_form().unwrap();
        let back = crate::smiles::parse(c1.as_str()).unwrap();
        assert_eq!(back.canonical_form().unwrap(), c1);
    }
}
