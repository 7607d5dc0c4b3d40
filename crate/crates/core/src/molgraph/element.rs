//! Supported elements and the valence table.

use std::fmt;

use crate::error::{Error, Result};

/// The organic-subset elements this crate models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    B,
    C,
    N,
    O,
    P,
    S,
    F,
    Cl,
    Br,
    I,
}

/// All supported elements, in periodic order.
pub const ELEMENTS: [Element; 10] = [
    Element::B,
    Element::C,
    Element::N,
    Element::O,
    Element::P,
    Element::S,
    Element::F,
    Element::Cl,
    Element::Br,
    Element::I,
];

// Valence table: single source of truth for every valence decision in the
// crate.
//
// Neutral valences:
//   B: 3   C: 4   N: 3   O: 2   P: 3,5   S: 2,4,6   F/Cl/Br/I: 1
//
// Formal charge q (restricted to -2..=2) shifts each allowed valence:
//   C             -> v - |q|   (carbanion and carbenium are both trivalent)
//   B             -> v - q     (borohydride-style anions gain a slot,
//                               borenium cations lose one)
//   N, O, P, S,
//   halogens      -> v + q     (ammonium 4, oxocarbenium 3, alkoxide 1, ...)
//
// Shifted values that fall below zero are dropped; an empty result means the
// element/charge combination bonds nothing.
impl Element {
    pub fn symbol(&self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::P => "P",
            Element::S => "S",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Element> {
        Some(match s {
            "B" => Element::B,
            "C" => Element::C,
            "N" => Element::N,
            "O" => Element::O,
            "P" => Element::P,
            "S" => Element::S,
            "F" => Element::F,
            "Cl" => Element::Cl,
            "Br" => Element::Br,
            "I" => Element::I,
            _ => return None,
        })
    }

    /// Aromatic (lowercase) symbols permitted by the grammar.
    pub fn from_aromatic_symbol(s: &str) -> Option<Element> {
        Some(match s {
            "b" => Element::B,
            "c" => Element::C,
            "n" => Element::N,
            "o" => Element::O,
            "p" => Element::P,
            "s" => Element::S,
            _ => return None,
        })
    }

    /// True for elements that may carry an aromatic flag.
    pub fn supports_aromatic(&self) -> bool {
        matches!(
            self,
            Element::B | Element::C | Element::N | Element::O | Element::P | Element::S
        )
    }

    fn neutral_valences(&self) -> &'static [i8] {
        match self {
            Element::B => &[3],
            Element::C => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::P => &[3, 5],
            Element::S => &[2, 4, 6],
            Element::F | Element::Cl | Element::Br | Element::I => &[1],
        }
    }

    /// Allowed total valences (bond order sum plus hydrogens) for this
    /// element at the given formal charge, ascending.
    pub fn allowed_valences(&self, charge: i8) -> Vec<u32> {
        let shift = match self {
            Element::C => -charge.abs(),
            Element::B => -charge,
            _ => charge,
        };
        self.neutral_valences()
            .iter()
            .filter_map(|v| u32::try_from(v + shift).ok())
            .collect()
    }

    /// Smallest allowed valence that accommodates `bond_sum` bonding
    /// electrons, or `None` if the element is over-bonded.
    pub fn fill_valence(&self, charge: i8, bond_sum: u32) -> Option<u32> {
        self.allowed_valences(charge)
            .into_iter()
            .find(|v| *v >= bond_sum)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub(crate) fn check_charge(charge: i8) -> Result<()> {
    if !(-2..=2).contains(&charge) {
        return Err(Error::Structure(format!(
            "formal charge {charge} outside -2..=2"
        )));
    }
    Ok(())
}
