//! Parser and writer for a SMILES subset.
//!
//! Grammar: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I, plus the
//! aromatic forms b, c, n, o, p, s), bracket atoms with hydrogen counts and
//! charges in -2..=2, bonds `-`, `=`, `#`, branches, and ring closures
//! `0`-`9` and `%nn`. Aromatic input is kekulized at parse time; the
//! internal model stores explicit bond orders only and the writer emits
//! kekulized (uppercase) SMILES. Stereo marks, isotopes, wildcard atoms and
//! dot-disconnected input are reported as [`Error::Unsupported`].

mod kekulize;

pub use kekulize::kekulize;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::molgraph::{Atom, Bond, BondOrder, Element, MolGraph, MAX_HEAVY_ATOMS};

/// Parses a SMILES string into a valid, kekulized molecular graph.
pub fn parse(text: &str) -> Result<MolGraph> {
    let mut parser = Parser::new(text);
    parser.run()?;
    parser.finish()
}

/// Serializes a molecule as its canonical SMILES string.
///
/// The output reparses to an isomorphic graph and is byte-identical for
/// isomorphic inputs.
pub fn write(g: &MolGraph) -> Result<String> {
    Ok(g.canonical_form()?.into_string())
}

fn syntax(offset: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        msg: msg.into(),
    }
}

fn unsupported(offset: usize, feature: impl Into<String>) -> Error {
    Error::Unsupported {
        offset,
        feature: feature.into(),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    aromatic_bond: Vec<bool>,
    bonded_pairs: HashMap<(usize, usize), ()>,
    prev_atom: Option<usize>,
    branch_stack: Vec<(usize, usize)>,
    pending_bond: Option<(BondOrder, usize)>,
    ring_open: HashMap<u8, (usize, Option<BondOrder>, usize)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            aromatic_bond: Vec::new(),
            bonded_pairs: HashMap::new(),
            prev_atom: None,
            branch_stack: Vec::new(),
            pending_bond: None,
            ring_open: HashMap::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<()> {
        while let Some(c) = self.peek() {
            let at = self.pos;
            match c {
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom, at)?;
                }
                b'A'..=b'Z' => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom, at)?;
                }
                b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                    self.pos += 1;
                    let element = Element::from_aromatic_symbol(&(c as char).to_string())
                        .expect("aromatic symbol");
                    self.add_atom(Atom::new(element).aromatic(), at)?;
                }
                b'-' | b'=' | b'#' => {
                    self.pos += 1;
                    let order = match c {
                        b'-' => BondOrder::Single,
                        b'=' => BondOrder::Double,
                        _ => BondOrder::Triple,
                    };
                    if self.prev_atom.is_none() {
                        return Err(syntax(at, "bond symbol before any atom"));
                    }
                    if self.pending_bond.is_some() {
                        return Err(syntax(at, "two consecutive bond symbols"));
                    }
                    self.pending_bond = Some((order, at));
                }
                b'(' => {
                    self.pos += 1;
                    let prev = self
                        .prev_atom
                        .ok_or_else(|| syntax(at, "branch open before any atom"))?;
                    if self.pending_bond.is_some() {
                        return Err(syntax(at, "bond symbol before branch open"));
                    }
                    self.branch_stack.push((prev, at));
                }
                b')' => {
                    self.pos += 1;
                    if self.pending_bond.is_some() {
                        return Err(syntax(at, "dangling bond before branch close"));
                    }
                    let (prev, _) = self
                        .branch_stack
                        .pop()
                        .ok_or_else(|| syntax(at, "unmatched branch close"))?;
                    self.prev_atom = Some(prev);
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure(c - b'0', at)?;
                }
                b'%' => {
                    self.pos += 1;
                    let d1 = self.peek().filter(u8::is_ascii_digit).ok_or_else(|| {
                        syntax(self.pos, "expected two digits after '%'")
                    })?;
                    self.pos += 1;
                    let d2 = self.peek().filter(u8::is_ascii_digit).ok_or_else(|| {
                        syntax(self.pos, "expected two digits after '%'")
                    })?;
                    self.pos += 1;
                    self.ring_closure((d1 - b'0') * 10 + (d2 - b'0'), at)?;
                }
                b'.' => return Err(unsupported(at, "dot-disconnected input")),
                b'/' | b'\\' => return Err(unsupported(at, "stereo bond mark")),
                b':' => return Err(unsupported(at, "aromatic bond symbol")),
                b'*' => return Err(unsupported(at, "wildcard atom")),
                _ => {
                    return Err(syntax(
                        at,
                        format!("unexpected character {:?}", c as char),
                    ))
                }
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom> {
        let at = self.pos;
        let c = self.bytes[self.pos];
        self.pos += 1;
        // two-letter organic-subset symbols
        if c == b'C' && self.peek() == Some(b'l') {
            self.pos += 1;
            return Ok(Atom::new(Element::Cl));
        }
        if c == b'B' && self.peek() == Some(b'r') {
            self.pos += 1;
            return Ok(Atom::new(Element::Br));
        }
        match Element::from_symbol(&(c as char).to_string()) {
            Some(element) => Ok(Atom::new(element)),
            None => Err(unsupported(at, format!("element {:?}", c as char))),
        }
    }

    fn bracket_atom(&mut self) -> Result<Atom> {
        let open = self.pos;
        self.pos += 1; // consume '['

        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(unsupported(self.pos, "isotope specification"));
        }

        let sym_start = self.pos;
        let first = self
            .peek()
            .ok_or_else(|| syntax(self.pos, "unterminated bracket atom"))?;
        if !first.is_ascii_alphabetic() {
            return Err(syntax(self.pos, "expected element symbol in brackets"));
        }
        self.pos += 1;
        // symbol continues with lowercase letters except a trailing H count
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_lowercase())
        {
            self.pos += 1;
        }
        let symbol = std::str::from_utf8(&self.bytes[sym_start..self.pos])
            .expect("ascii symbol");

        let (element, aromatic) = if first.is_ascii_lowercase() {
            match Element::from_aromatic_symbol(symbol) {
                Some(e) => (e, true),
                None => return Err(unsupported(sym_start, format!("element {symbol:?}"))),
            }
        } else if symbol == "H" {
            return Err(unsupported(sym_start, "bare hydrogen atom"));
        } else {
            match Element::from_symbol(symbol) {
                Some(e) => (e, false),
                None => return Err(unsupported(sym_start, format!("element {symbol:?}"))),
            }
        };

        if self.peek() == Some(b'@') {
            return Err(unsupported(self.pos, "stereo center mark"));
        }

        let mut hydrogens: u8 = 0;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = 1;
            if let Some(d) = self.peek().filter(u8::is_ascii_digit) {
                self.pos += 1;
                hydrogens = d - b'0';
            }
        }

        let mut charge: i8 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit: i8 = if sign == b'+' { 1 } else { -1 };
            let sign_at = self.pos;
            self.pos += 1;
            charge = unit;
            if let Some(d) = self.peek().filter(u8::is_ascii_digit) {
                self.pos += 1;
                charge = unit * (d - b'0') as i8;
            } else {
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                    if charge.abs() > 9 {
                        break;
                    }
                }
            }
            if charge.abs() > 2 {
                return Err(unsupported(
                    sign_at,
                    format!("formal charge {charge:+} outside -2..=+2"),
                ));
            }
        }

        match self.peek() {
            Some(b']') => self.pos += 1,
            Some(b':') => return Err(unsupported(self.pos, "atom class label")),
            Some(c) => {
                return Err(syntax(
                    self.pos,
                    format!("unexpected {:?} in bracket atom", c as char),
                ))
            }
            None => return Err(syntax(open, "unterminated bracket atom")),
        }

        let mut atom = Atom::new(element)
            .with_charge(charge)
            .with_explicit_h(hydrogens);
        if aromatic {
            atom = atom.aromatic();
        }
        Ok(atom)
    }

    fn add_atom(&mut self, atom: Atom, at: usize) -> Result<()> {
        if self.atoms.len() == MAX_HEAVY_ATOMS {
            return Err(Error::TooLarge);
        }
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev_atom {
            let (order, aromatic) = match self.pending_bond.take() {
                Some((order, _)) => (order, false),
                None => {
                    let aromatic = self.atoms[prev].aromatic && self.atoms[idx].aromatic;
                    (BondOrder::Single, aromatic)
                }
            };
            self.push_bond(prev, idx, order, aromatic, at)?;
        }
        self.prev_atom = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, id: u8, at: usize) -> Result<()> {
        let current = self
            .prev_atom
            .ok_or_else(|| syntax(at, "ring closure before any atom"))?;
        let pending = self.pending_bond.take().map(|(o, _)| o);
        match self.ring_open.remove(&id) {
            Some((open_atom, open_order, _)) => {
                if open_atom == current {
                    return Err(syntax(at, format!("ring closure {id} bonds an atom to itself")));
                }
                let resolved = match (open_order, pending) {
                    (None, None) => None,
                    (Some(o), None) | (None, Some(o)) => Some(o),
                    (Some(a), Some(b)) if a == b => Some(a),
                    (Some(_), Some(_)) => {
                        return Err(syntax(
                            at,
                            format!("conflicting bond orders on ring closure {id}"),
                        ))
                    }
                };
                let aromatic = resolved.is_none()
                    && self.atoms[open_atom].aromatic
                    && self.atoms[current].aromatic;
                self.push_bond(
                    open_atom,
                    current,
                    resolved.unwrap_or(BondOrder::Single),
                    aromatic,
                    at,
                )
            }
            None => {
                self.ring_open.insert(id, (current, pending, at));
                Ok(())
            }
        }
    }

    fn push_bond(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        aromatic: bool,
        at: usize,
    ) -> Result<()> {
        let key = (a.min(b), a.max(b));
        if self.bonded_pairs.insert(key, ()).is_some() {
            return Err(syntax(at, format!("duplicate bond between atoms {a} and {b}")));
        }
        self.bonds.push(Bond::new(a, b, order));
        self.aromatic_bond.push(aromatic);
        Ok(())
    }

    fn finish(self) -> Result<MolGraph> {
        if self.pending_bond.is_some() {
            let (_, at) = self.pending_bond.unwrap();
            return Err(syntax(at, "dangling bond at end of input"));
        }
        if let Some(&(_, at)) = self.branch_stack.first() {
            return Err(syntax(at, "unclosed branch"));
        }
        if let Some((&id, &(_, _, at))) = self.ring_open.iter().min_by_key(|(_, &(_, _, at))| at) {
            return Err(syntax(at, format!("unclosed ring closure {id}")));
        }
        if self.atoms.is_empty() {
            return Err(syntax(0, "empty input"));
        }
        let raw = MolGraph::from_parts(self.atoms, self.bonds)?;
        let resolved = kekulize::kekulize_with_flags(&raw, &self.aromatic_bond)?;
        resolved.validate()?;
        Ok(resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::Formula;

    fn formula(text: &str) -> Formula {
        parse(text).unwrap().molecular_formula().unwrap()
    }

    #[test]
    fn single_carbon() {
        let g = parse("C").unwrap();
        assert_eq!(g.atom_count(), 1);
        assert_eq!(g.implicit_hydrogens(0).unwrap(), 4);
    }

    #[test]
    fn cyclopropane_ring_closure() {
        let g = parse("C1CC1").unwrap();
        assert_eq!(g.atom_count(), 3);
        assert_eq!(g.bonds().len(), 3);
        for i in 0..3 {
            assert_eq!(g.implicit_hydrogens(i).unwrap(), 2);
        }
    }

    #[test]
    fn benzene_kekulizes() {
        let g = parse("c1ccccc1").unwrap();
        assert_eq!(g.molecular_formula().unwrap(), Formula::parse("C6H6").unwrap());
        let doubles = g
            .bonds()
            .iter()
            .filter(|b| b.order == BondOrder::Double)
            .count();
        assert_eq!(doubles, 3);
        assert!(g.check_valence());
        // alternation: no atom carries two double bonds
        for i in 0..6 {
            let d = g
                .neighbors(i)
                .iter()
                .filter(|&&(_, bidx)| g.bond(bidx).order == BondOrder::Double)
                .count();
            assert_eq!(d, 1);
        }
    }

    #[test]
    fn pyridine_and_pyrrole() {
        let g = parse("c1ccncc1").unwrap();
        assert_eq!(g.molecular_formula().unwrap(), Formula::parse("C5H5N").unwrap());
        let g = parse("c1cc[nH]c1").unwrap();
        assert_eq!(g.molecular_formula().unwrap(), Formula::parse("C4H5N").unwrap());
        // pyrrole written without the H marker has no kekule structure
        assert!(matches!(parse("c1ccnc1"), Err(Error::Kekulization(_))));
    }

    #[test]
    fn furan_and_thiophene() {
        assert_eq!(formula("c1ccoc1"), Formula::parse("C4H4O").unwrap());
        assert_eq!(formula("c1ccsc1"), Formula::parse("C4H4S").unwrap());
    }

    #[test]
    fn fused_aromatics() {
        assert_eq!(formula("c1ccc2ccccc2c1"), Formula::parse("C10H8").unwrap());
    }

    #[test]
    fn aromatic_chain_fails() {
        assert!(matches!(parse("cc"), Err(Error::Kekulization(_))));
        assert!(matches!(parse("c"), Err(Error::Kekulization(_))));
    }

    #[test]
    fn biphenyl_link_stays_single() {
        let dash = parse("c1ccccc1-c1ccccc1").unwrap();
        let plain = parse("c1ccccc1c1ccccc1").unwrap();
        assert_eq!(dash.canonical_form().unwrap(), plain.canonical_form().unwrap());
        assert_eq!(
            dash.molecular_formula().unwrap(),
            Formula::parse("C12H10").unwrap()
        );
    }

    #[test]
    fn branches_and_bonds() {
        assert_eq!(formula("CC(=O)O"), Formula::parse("C2H4O2").unwrap());
        assert_eq!(formula("C#N"), Formula::parse("CHN").unwrap());
        assert_eq!(formula("CCO"), Formula::parse("C2H6O").unwrap());
    }

    #[test]
    fn bracket_atoms() {
        let g = parse("[NH4+]").unwrap();
        assert_eq!(g.atom(0).charge, 1);
        assert_eq!(g.total_hydrogens(0).unwrap(), 4);
        let g = parse("[O-]C").unwrap();
        assert_eq!(g.atom(0).charge, -1);
        let g = parse("[CH3-]").unwrap();
        assert_eq!(g.atom(0).charge, -1);
        assert_eq!(g.total_hydrogens(0).unwrap(), 3);
        // charge counted twice
        let g = parse("[O-2]").unwrap();
        assert_eq!(g.atom(0).charge, -2);
        let g = parse("[O--]").unwrap();
        assert_eq!(g.atom(0).charge, -2);
    }

    #[test]
    fn ring_bond_order_agreement() {
        // order stated at one end, or equal at both, is accepted
        let a = parse("C=1CCCCC=1").unwrap();
        let b = parse("C=1CCCCC1").unwrap();
        let c = parse("C1CCCCC=1").unwrap();
        assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
        assert_eq!(a.canonical_form().unwrap(), c.canonical_form().unwrap());
        // mismatched orders are a syntax error
        assert!(matches!(parse("C=1CCCCC#1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unsupported_features() {
        assert!(matches!(parse("C.C"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("[13C]"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("[C@H](N)C"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("C/C=C/C"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("[Na+]"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("*"), Err(Error::Unsupported { .. })));
        assert!(matches!(parse("[O+3]"), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("CC(C") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("C1CC") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse("C=="), Err(Error::Syntax { .. })));
        assert!(matches!(parse("=C"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("C)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("C%1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("C11"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("C12CC12"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn valence_violations_detected() {
        assert!(matches!(parse("C(C)(C)(C)(C)C"), Err(Error::ValenceViolation { .. })));
        assert!(matches!(parse("[CH2]"), Err(Error::ValenceViolation { .. })));
        assert!(matches!(parse("O=O=O"), Err(Error::ValenceViolation { .. })));
    }

    #[test]
    fn roundtrip_examples() {
        for smiles in [
            "C",
            "CCO",
            "CC(=O)O",
            "c1ccccc1",
            "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
            "[NH4+]",
            "C1CC2CCC1CC2",
            "N#Cc1ccccc1",
        ] {
            let g = parse(smiles).unwrap();
            let text = write(&g).unwrap();
            let back = parse(&text).unwrap();
            assert_eq!(
                g.canonical_form().unwrap(),
                back.canonical_form().unwrap(),
                "round trip failed for {smiles}: wrote {text}"
            );
        }
    }

    #[test]
    fn write_methane() {
        assert_eq!(write(&parse("C").unwrap()).unwrap(), "C");
    }

    #[test]
    fn kekulize_identity_on_resolved_input() {
        let g = parse("CC(=O)O").unwrap();
        let k = kekulize(&g).unwrap();
        assert_eq!(g, k);
    }
}
