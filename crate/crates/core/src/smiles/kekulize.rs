//! Assignment of explicit single/double orders to aromatic systems.

use crate::error::{Error, Result};
use crate::molgraph::{Bond, BondOrder, Element, HCount, MolGraph};

/// Resolves aromatic flags by assigning alternating double bonds.
///
/// Bonds are considered aromatic when both endpoints carry the aromatic
/// flag; bridge bonds of that subgraph (bonds in no ring) are excluded, so
/// biphenyl-style links stay single. Already-kekulized input is returned
/// unchanged.
pub fn kekulize(g: &MolGraph) -> Result<MolGraph> {
    let flags: Vec<bool> = g
        .bonds()
        .iter()
        .map(|b| g.atom(b.a).aromatic && g.atom(b.b).aromatic)
        .collect();
    kekulize_with_flags(g, &flags)
}

/// Kekulization with an explicit per-bond aromaticity mask (the parser
/// knows which bonds were written aromatic, which excludes explicit single
/// bonds between aromatic atoms).
pub(crate) fn kekulize_with_flags(g: &MolGraph, aromatic_bond: &[bool]) -> Result<MolGraph> {
    if g.atoms().iter().all(|a| !a.aromatic) {
        return Ok(g.clone());
    }

    // Aromatic bonds that sit in a ring of the aromatic subgraph.
    let mut candidate = aromatic_bond.to_vec();
    for (idx, bond) in g.bonds().iter().enumerate() {
        if candidate[idx] && !(g.atom(bond.a).aromatic && g.atom(bond.b).aromatic) {
            return Err(Error::Kekulization(format!(
                "aromatic bond {}-{} touches a non-aromatic atom",
                bond.a, bond.b
            )));
        }
    }
    exclude_subgraph_bridges(g, &mut candidate);

    let needs = needed_double_bonds(g)?;

    // Perfect matching over atoms that need a double bond, restricted to
    // candidate aromatic ring bonds.
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.atom_count()];
    for (idx, bond) in g.bonds().iter().enumerate() {
        if candidate[idx] && needs[bond.a] && needs[bond.b] {
            adjacency[bond.a].push((bond.b, idx));
            adjacency[bond.b].push((bond.a, idx));
        }
    }
    let needy: Vec<usize> = (0..g.atom_count()).filter(|&i| needs[i]).collect();
    let mut matched_bond = vec![false; g.bonds().len()];
    let mut matched_atom = vec![false; g.atom_count()];
    if !match_needy(&needy, &adjacency, &mut matched_atom, &mut matched_bond) {
        return Err(Error::Kekulization(
            "no alternating double-bond assignment satisfies the aromatic system".into(),
        ));
    }

    let atoms = g
        .atoms()
        .iter()
        .map(|a| {
            let mut a = *a;
            a.aromatic = false;
            a
        })
        .collect();
    let bonds = g
        .bonds()
        .iter()
        .enumerate()
        .map(|(idx, b)| {
            let order = if matched_bond[idx] {
                BondOrder::Double
            } else {
                b.order
            };
            Bond::new(b.a, b.b, order)
        })
        .collect();
    MolGraph::from_parts(atoms, bonds)
}

/// Clears candidate flags on bonds that are bridges of the candidate
/// subgraph (cycle membership is what makes a bond kekulizable).
fn exclude_subgraph_bridges(g: &MolGraph, candidate: &mut [bool]) {
    let n = g.atom_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
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
            if *pos < g.neighbors(v).len() {
                let (n_idx, b_idx) = g.neighbors(v)[*pos];
                *pos += 1;
                if !candidate[b_idx] || b_idx == in_bond {
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
                        candidate[in_bond] = false;
                    }
                }
            }
        }
    }
}

/// Which atoms must receive exactly one double bond from the matching.
fn needed_double_bonds(g: &MolGraph) -> Result<Vec<bool>> {
    let mut needs = vec![false; g.atom_count()];
    for (i, a) in g.atoms().iter().enumerate() {
        if !a.aromatic {
            continue;
        }
        let sigma = g.bond_order_sum(i);
        let has_explicit_multiple = g
            .neighbors(i)
            .iter()
            .any(|&(_, bidx)| g.bond(bidx).order.as_u32() >= 2);

        let fixed_h = match a.hydrogens {
            HCount::Explicit(h) => Some(u32::from(h)),
            HCount::Implicit if a.charge != 0 => Some(0),
            HCount::Implicit => None,
        };
        let need = match fixed_h {
            // bracket-style atom: the stated hydrogen count pins the slack
            Some(h) => {
                let v = a.element.fill_valence(a.charge, sigma + h).ok_or_else(|| {
                    Error::Kekulization(format!(
                        "aromatic atom {i} ({}) is over-bonded",
                        a.element
                    ))
                })?;
                let slack = v - sigma - h;
                if slack > 1 {
                    return Err(Error::Kekulization(format!(
                        "aromatic atom {i} ({}) has {slack} open valences",
                        a.element
                    )));
                }
                slack == 1
            }
            // organic-subset aromatic atom
            None => {
                if has_explicit_multiple {
                    false
                } else {
                    match a.element {
                        Element::C => sigma + 1 <= 4,
                        Element::B => sigma + 1 <= 3,
                        // pyridine-style nitrogen; three connections mean a
                        // pyrrole-style contributor instead
                        Element::N | Element::P => sigma == 2,
                        Element::O | Element::S => false,
                        _ => false,
                    }
                }
            }
        };
        needs[i] = need;
    }
    Ok(needs)
}

/// Backtracking perfect matching over the needy atoms with forced-move
/// propagation. Aromatic systems are small, so this stays fast.
fn match_needy(
    needy: &[usize],
    adjacency: &[Vec<(usize, usize)>],
    matched_atom: &mut Vec<bool>,
    matched_bond: &mut Vec<bool>,
) -> bool {
    // forced moves: an unmatched needy atom with a single live partner
    loop {
        let mut forced = None;
        let mut all_done = true;
        for &v in needy {
            if matched_atom[v] {
                continue;
            }
            all_done = false;
            let live: Vec<(usize, usize)> = adjacency[v]
                .iter()
                .copied()
                .filter(|&(w, _)| !matched_atom[w])
                .collect();
            match live.len() {
                0 => return false,
                1 => {
                    forced = Some((v, live[0]));
                    break;
                }
                _ => {}
            }
        }
        if all_done {
            return true;
        }
        match forced {
            Some((v, (w, bidx))) => {
                matched_atom[v] = true;
                matched_atom[w] = true;
                matched_bond[bidx] = true;
            }
            None => break,
        }
    }

    // branch on the unmatched atom with the fewest live partners
    let branch = needy
        .iter()
        .copied()
        .filter(|&v| !matched_atom[v])
        .min_by_key(|&v| {
            adjacency[v]
                .iter()
                .filter(|&&(w, _)| !matched_atom[w])
                .count()
        })
        .expect("an unmatched atom exists");
    let options: Vec<(usize, usize)> = adjacency[branch]
        .iter()
        .copied()
        .filter(|&(w, _)| !matched_atom[w])
        .collect();
    for (w, bidx) in options {
        let saved_atoms = matched_atom.clone();
        let saved_bonds = matched_bond.clone();
        matched_atom[branch] = true;
        matched_atom[w] = true;
        matched_bond[bidx] = true;
        if match_needy(needy, adjacency, matched_atom, matched_bond) {
            return true;
        }
        *matched_atom = saved_atoms;
        *matched_bond = saved_bonds;
    }
    false
}
