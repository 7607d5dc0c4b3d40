//! Objective functions for optimization runs.
//!
//! Built-in oracles are pure, deterministic, and score in [0, 1]:
//! fingerprint similarity (also used for rediscovery tasks), molecular
//! formula matching for isomer tasks, simple structural targets, and
//! weighted geometric-mean composition. External scorers attach through a
//! line-protocol subprocess, see [`external::ExternalOracle`].

pub mod external;

pub use external::ExternalOracle;

use crate::error::{Error, Result};
use crate::fingerprint::{morgan_fingerprint, tanimoto, Fingerprint, DEFAULT_RADIUS};
use crate::molgraph::{Formula, MolGraph};
use crate::scalar::Scalar;

/// Smoothing constant for count-deviation scores (isomer and structural
/// targets): score = exp(-deviation / T).
pub const DEVIATION_TEMPERATURE: f64 = 2.0;

/// A black-box objective over molecules.
///
/// Implementations must be pure and deterministic; every distinct call the
/// engine makes is charged against the evaluation budget.
pub trait Oracle<F: Scalar>: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, mol: &MolGraph) -> Result<F>;
}

/// Tanimoto similarity to a fixed target, radius-2 fingerprints. Scores 1.0
/// exactly on the target itself, which makes it the rediscovery objective.
pub struct SimilarityOracle {
    name: String,
    target: Fingerprint,
}

impl SimilarityOracle {
    pub fn new(name: impl Into<String>, target: &MolGraph) -> Result<SimilarityOracle> {
        Ok(SimilarityOracle {
            name: name.into(),
            target: morgan_fingerprint(target, DEFAULT_RADIUS)?,
        })
    }
}

impl<F: Scalar> Oracle<F> for SimilarityOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        let fp = morgan_fingerprint(mol, DEFAULT_RADIUS)?;
        tanimoto(&fp, &self.target)
    }
}

/// Molecular-formula match: exp(-sum |count deviation| / T), maximal (1.0)
/// exactly on isomers of the target formula and positive everywhere.
pub struct IsomerOracle {
    name: String,
    formula: Formula,
    temperature: f64,
}

impl IsomerOracle {
    pub fn new(formula: Formula) -> IsomerOracle {
        IsomerOracle {
            name: format!("isomers_{}", formula.to_string().to_lowercase()),
            formula,
            temperature: DEVIATION_TEMPERATURE,
        }
    }
}

impl<F: Scalar> Oracle<F> for IsomerOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        let deviation = mol.molecular_formula()?.distance(&self.formula);
        Ok(F::from_config(
            (-f64::from(deviation) / self.temperature).exp(),
        ))
    }
}

/// Heavy-atom-count target: exp(-|n - target| / T).
pub struct HeavyAtomTarget {
    name: String,
    target: usize,
    temperature: f64,
}

impl HeavyAtomTarget {
    pub fn new(target: usize) -> HeavyAtomTarget {
        HeavyAtomTarget {
            name: format!("heavy_atoms_{target}"),
            target,
            temperature: DEVIATION_TEMPERATURE,
        }
    }
}

impl<F: Scalar> Oracle<F> for HeavyAtomTarget {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        let deviation = mol.atom_count().abs_diff(self.target);
        Ok(F::from_config(
            (-(deviation as f64) / self.temperature).exp(),
        ))
    }
}

/// Ring-count target over the cyclomatic number: exp(-|rings - target| / T).
pub struct RingCountTarget {
    name: String,
    target: usize,
    temperature: f64,
}

impl RingCountTarget {
    pub fn new(target: usize) -> RingCountTarget {
        RingCountTarget {
            name: format!("rings_{target}"),
            target,
            temperature: DEVIATION_TEMPERATURE,
        }
    }
}

impl<F: Scalar> Oracle<F> for RingCountTarget {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        // cyclomatic number of a connected graph
        let rings = mol.bonds().len() + 1 - mol.atom_count();
        let deviation = rings.abs_diff(self.target);
        Ok(F::from_config(
            (-(deviation as f64) / self.temperature).exp(),
        ))
    }
}

/// Fixed score regardless of input; useful for budget accounting tests.
pub struct ConstantOracle<F: Scalar> {
    name: String,
    value: F,
}

impl<F: Scalar> ConstantOracle<F> {
    pub fn new(value: F) -> ConstantOracle<F> {
        ConstantOracle {
            name: format!("const_{value}"),
            value,
        }
    }
}

impl<F: Scalar> Oracle<F> for ConstantOracle<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, _mol: &MolGraph) -> Result<F> {
        Ok(self.value)
    }
}

/// Weighted geometric mean of component oracles: zero whenever any
/// component is zero, equal to the shared value at unanimity.
pub struct GeometricMpo<F: Scalar> {
    name: String,
    components: Vec<(Box<dyn Oracle<F>>, F)>,
}

impl<F: Scalar> GeometricMpo<F> {
    pub fn new(
        name: impl Into<String>,
        components: Vec<(Box<dyn Oracle<F>>, F)>,
    ) -> Result<GeometricMpo<F>> {
        if components.is_empty() {
            return Err(Error::Config("mpo oracle needs at least one component".into()));
        }
        if components.iter().any(|(_, w)| *w <= F::zero() || !w.is_finite()) {
            return Err(Error::Config("mpo weights must be positive".into()));
        }
        Ok(GeometricMpo {
            name: name.into(),
            components,
        })
    }
}

impl<F: Scalar> Oracle<F> for GeometricMpo<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, mol: &MolGraph) -> Result<F> {
        let total_weight = self
            .components
            .iter()
            .fold(F::zero(), |acc, (_, w)| acc + *w);
        let mut log_sum = F::zero();
        for (oracle, weight) in &self.components {
            let s = oracle.score(mol)?;
            if s <= F::zero() {
                return Ok(F::zero());
            }
            log_sum = log_sum + *weight * s.ln();
        }
        Ok((log_sum / total_weight).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    fn score<O: Oracle<f64>>(oracle: &O, smiles: &str) -> f64 {
        oracle.score(&parse(smiles).unwrap()).unwrap()
    }

    #[test]
    fn similarity_examples() {
        let target = parse("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        let oracle = SimilarityOracle::new("aspirin_similarity", &target).unwrap();
        assert_eq!(score(&oracle, "CC(=O)Oc1ccccc1C(=O)O"), 1.0);
        // methane against a large aromatic target
        assert!(score(&oracle, "C") < 0.2);
        // symmetric in target/candidate roles
        let methane = parse("C").unwrap();
        let reversed = SimilarityOracle::new("rev", &methane).unwrap();
        let forward: f64 = oracle.score(&methane).unwrap();
        let backward: f64 = reversed.score(&target).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn isomer_examples() {
        let oracle = IsomerOracle::new(Formula::parse("C7H8N2O2").unwrap());
        // amino-nitrotoluene is an exact C7H8N2O2 isomer
        let exact = "Cc1ccc(cc1N)[N+](=O)[O-]";
        let g = parse(exact).unwrap();
        assert_eq!(
            g.molecular_formula().unwrap(),
            Formula::parse("C7H8N2O2").unwrap()
        );
        assert_eq!(score(&oracle, exact), 1.0);
        // one extra carbon: exp(-1/2)
        let one_off = IsomerOracle::new(Formula::parse("C2H6").unwrap());
        let s = score(&one_off, "CCC"); // C3H8: deviation 1 C + 2 H = 3
        assert!((s - (-1.5f64).exp()).abs() < 1e-12);
        // deviation of exactly one atom
        let methane_target = IsomerOracle::new(Formula::parse("CH4").unwrap());
        let s: f64 = methane_target.score(&parse("C").unwrap()).unwrap();
        assert_eq!(s, 1.0);
        // smooth positivity on arbitrary molecules
        assert!(score(&oracle, "S") > 0.0);
    }

    #[test]
    fn isomer_one_carbon_deviation() {
        // pin the declared shape: one unit of deviation scores exp(-0.5)
        let oracle = IsomerOracle::new(Formula::parse("C2H6O").unwrap());
        let s = score(&oracle, "CC(C)O"); // C3H8O: +1 C, +2 H -> deviation 3
        assert!((s - (-1.5f64).exp()).abs() < 1e-12);
        let oracle = IsomerOracle::new(Formula::parse("C4H10").unwrap());
        let s = score(&oracle, "CC(C)C"); // exact match
        assert_eq!(s, 1.0);
    }

    #[test]
    fn structural_targets() {
        let heavy = HeavyAtomTarget::new(3);
        assert_eq!(score(&heavy, "CCO"), 1.0);
        assert!((score(&heavy, "CCCO") - (-0.5f64).exp()).abs() < 1e-12);

        let rings = RingCountTarget::new(1);
        assert_eq!(score(&rings, "C1CC1"), 1.0);
        assert!((score(&rings, "CCC") - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn geometric_mpo_examples() {
        let c25: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(0.25));
        let c10: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(1.0));
        let mpo = GeometricMpo::new("m", vec![(c25, 1.0), (c10, 1.0)]).unwrap();
        assert!((score(&mpo, "C") - 0.5).abs() < 1e-12);

        let one: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(1.0));
        let other: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(1.0));
        let mpo = GeometricMpo::new("ones", vec![(one, 2.0), (other, 3.0)]).unwrap();
        assert_eq!(score(&mpo, "C"), 1.0);

        // single component acts as identity
        let single: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(0.7));
        let mpo = GeometricMpo::new("s", vec![(single, 5.0)]).unwrap();
        assert!((score(&mpo, "C") - 0.7).abs() < 1e-12);

        // zero component zeroes the product
        let zero: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(0.0));
        let good: Box<dyn Oracle<f64>> = Box::new(ConstantOracle::new(0.9));
        let mpo = GeometricMpo::new("z", vec![(zero, 1.0), (good, 1.0)]).unwrap();
        assert_eq!(score(&mpo, "C"), 0.0);

        assert!(GeometricMpo::<f64>::new("empty", vec![]).is_err());
    }

    #[test]
    fn scores_stay_in_unit_interval() {
        let target = parse("c1ccncc1").unwrap();
        let sim = SimilarityOracle::new("s", &target).unwrap();
        let iso = IsomerOracle::new(Formula::parse("C5H5N").unwrap());
        for smiles in ["C", "CCO", "c1ccccc1", "C1CCCCC1", "N", "OS(=O)(=O)O"] {
            for s in [score(&sim, smiles), score(&iso, smiles)] {
                assert!((0.0..=1.0).contains(&s), "{smiles} scored {s}");
            }
        }
    }
}
