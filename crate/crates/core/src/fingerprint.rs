//! Circular substructure fingerprints and Tanimoto similarity.
//!
//! Identifiers are 64-bit hashes of canonical neighborhood encodings: each
//! atom contributes one id per radius from 0 up to the requested radius.
//! The encoding of an atom at radius r+1 combines its radius-r id with the
//! sorted list of (bond order, neighbor radius-r id) pairs, so ids are
//! invariant under atom relabeling. Fingerprints are kept as exact id sets
//! rather than folded bit vectors, which makes Tanimoto exact.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::molgraph::MolGraph;
use crate::scalar::Scalar;

/// Fixed seed for the 64-bit FNV-1a identifier hash. Changing it changes
/// every fingerprint; it is the single constant hash inputs fold into.
pub const FINGERPRINT_HASH_SEED: u64 = 0xcbf2_9ce4_8422_2325;

const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Default neighborhood radius (two bonds, the common similarity choice).
pub const DEFAULT_RADIUS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Fingerprint {
    ids: BTreeSet<u64>,
}

impl Fingerprint {
    pub fn ids(&self) -> &BTreeSet<u64> {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn intersection_size(&self, other: &Fingerprint) -> usize {
        self.ids.intersection(&other.ids).count()
    }

    #[cfg(test)]
    pub(crate) fn from_ids(ids: impl IntoIterator<Item = u64>) -> Fingerprint {
        Fingerprint {
            ids: ids.into_iter().collect(),
        }
    }
}

fn fnv1a(words: &[u64]) -> u64 {
    let mut h = FINGERPRINT_HASH_SEED;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Circular fingerprint of every (atom, radius <= `radius`) neighborhood.
///
/// Requires a valid molecule and a radius in 1..=4.
pub fn morgan_fingerprint(g: &MolGraph, radius: u32) -> Result<Fingerprint> {
    if !(1..=4).contains(&radius) {
        return Err(Error::FingerprintRadius(radius));
    }
    if !g.check_valence() {
        return Err(Error::InvalidMolecule(
            "fingerprints require a valence-valid molecule".into(),
        ));
    }
    let n = g.atom_count();
    let mut ids = BTreeSet::new();
    let mut inv: Vec<u64> = (0..n)
        .map(|i| {
            let a = g.atom(i);
            Ok(fnv1a(&[
                0,
                a.element as u64,
                a.charge as i64 as u64,
                u64::from(g.total_hydrogens(i)?),
            ]))
        })
        .collect::<Result<_>>()?;
    ids.extend(inv.iter().copied());
    for _ in 1..=radius {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut env: Vec<(u64, u64)> = g
                .neighbors(i)
                .iter()
                .map(|&(nbr, bidx)| (u64::from(g.bond(bidx).order.as_u32()), inv[nbr]))
                .collect();
            env.sort_unstable();
            let mut words = vec![1, inv[i]];
            for (order, nbr_inv) in env {
                words.push(order);
                words.push(nbr_inv);
            }
            next.push(fnv1a(&words));
        }
        ids.extend(next.iter().copied());
        inv = next;
    }
    Ok(Fingerprint { ids })
}

/// Tanimoto similarity |a n b| / |a u b| over id sets, in [0, 1].
pub fn tanimoto<F: Scalar>(a: &Fingerprint, b: &Fingerprint) -> Result<F> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyFingerprint);
    }
    let inter = a.intersection_size(b);
    let union = a.len() + b.len() - inter;
    Ok(F::from_count(inter) / F::from_count(union))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    #[test]
    fn methane_has_ids() {
        let fp = morgan_fingerprint(&parse("C").unwrap(), 2).unwrap();
        assert!(!fp.is_empty());
    }

    #[test]
    fn permutation_invariant() {
        let g = parse("CCO").unwrap();
        let p = g.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(
            morgan_fingerprint(&g, 2).unwrap(),
            morgan_fingerprint(&p, 2).unwrap()
        );
    }

    #[test]
    fn ethane_and_ethanol_differ() {
        let a = morgan_fingerprint(&parse("CC").unwrap(), 2).unwrap();
        let b = morgan_fingerprint(&parse("CCO").unwrap(), 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn radius_bounds() {
        let g = parse("CC").unwrap();
        assert!(matches!(
            morgan_fingerprint(&g, 0),
            Err(Error::FingerprintRadius(0))
        ));
        assert!(matches!(
            morgan_fingerprint(&g, 5),
            Err(Error::FingerprintRadius(5))
        ));
    }

    #[test]
    fn tanimoto_definition() {
        let x = Fingerprint::from_ids([1, 2, 3]);
        let y = Fingerprint::from_ids([2, 3, 4]);
        assert_eq!(tanimoto::<f64>(&x, &x).unwrap(), 1.0);
        assert_eq!(tanimoto::<f64>(&x, &y).unwrap(), 0.5);
        let z = Fingerprint::from_ids([9]);
        assert_eq!(tanimoto::<f64>(&x, &z).unwrap(), 0.0);
        assert!(matches!(
            tanimoto::<f64>(&x, &Fingerprint::default()),
            Err(Error::EmptyFingerprint)
        ));
    }

    #[test]
    fn tanimoto_symmetric_and_bounded() {
        let a = morgan_fingerprint(&parse("CCO").unwrap(), 2).unwrap();
        let b = morgan_fingerprint(&parse("CCCN").unwrap(), 2).unwrap();
        let ab: f64 = tanimoto(&a, &b).unwrap();
        let ba: f64 = tanimoto(&b, &a).unwrap();
        assert_eq!(ab, ba);
        assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn isomorphic_graphs_score_one() {
        let a = parse("c1ccccc1O").unwrap();
        let b = parse("Oc1ccccc1").unwrap();
        let fa = morgan_fingerprint(&a, 2).unwrap();
        let fb = morgan_fingerprint(&b, 2).unwrap();
        assert_eq!(tanimoto::<f64>(&fa, &fb).unwrap(), 1.0);
    }

    #[test]
    fn f32_instantiation() {
        let a = morgan_fingerprint(&parse("CCO").unwrap(), 2).unwrap();
        let s: f32 = tanimoto(&a, &a).unwrap();
        assert_eq!(s, 1.0);
    }
}
