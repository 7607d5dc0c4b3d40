//! Scored molecules and the greedily selected population.

use std::collections::HashSet;

use serde::Serialize;

use crate::molgraph::{CanonicalForm, MolGraph};
use crate::scalar::Scalar;

/// A molecule with its oracle score and budget provenance.
#[derive(Debug, Clone)]
pub struct ScoredMol<F: Scalar> {
    pub canonical: CanonicalForm,
    pub graph: MolGraph,
    pub score: F,
    /// Budget counter value that produced the score; `None` when the score
    /// came from the cache.
    pub eval_index: Option<u64>,
}

/// Summary view of a population member for serialized results.
#[derive(Debug, Clone, Serialize)]
pub struct MemberSummary<F: Scalar> {
    pub canonical: String,
    pub score: F,
    pub eval_index: Option<u64>,
}

/// Members unique by canonical form, ordered by (score desc, canonical
/// asc), with at most `capacity` entries.
#[derive(Debug, Clone)]
pub struct Population<F: Scalar> {
    members: Vec<ScoredMol<F>>,
    capacity: usize,
}

impl<F: Scalar> Population<F> {
    pub fn new(capacity: usize) -> Population<F> {
        Population {
            members: Vec::new(),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in rank order (best first).
    pub fn ranked(&self) -> &[ScoredMol<F>] {
        &self.members
    }

    pub fn best(&self) -> Option<&ScoredMol<F>> {
        self.members.first()
    }

    pub fn contains(&self, canonical: &CanonicalForm) -> bool {
        self.members.iter().any(|m| &m.canonical == canonical)
    }

    pub fn summaries(&self) -> Vec<MemberSummary<F>> {
        self.members
            .iter()
            .map(|m| MemberSummary {
                canonical: m.canonical.as_str().to_string(),
                score: m.score,
                eval_index: m.eval_index,
            })
            .collect()
    }

    /// Greedy selection: keeps the `capacity` best of the deduplicated
    /// union of `current` and `offspring`. Ties break toward the
    /// lexicographically smaller canonical form, which makes selection
    /// deterministic.
    pub fn select(
        current: Population<F>,
        offspring: Vec<ScoredMol<F>>,
        capacity: usize,
    ) -> Population<F> {
        let mut seen: HashSet<String> = HashSet::new();
        let mut pool: Vec<ScoredMol<F>> = Vec::with_capacity(current.len() + offspring.len());
        for m in current.members.into_iter().chain(offspring) {
            if seen.insert(m.canonical.as_str().to_string()) {
                pool.push(m);
            }
        }
        pool.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.canonical.cmp(&b.canonical))
        });
        pool.truncate(capacity);
        Population {
            members: pool,
            capacity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{Atom, Element, MolGraph};

    // identity is carried by the canonical string; the graph is a
    // placeholder for these selection tests
    fn mol(canonical: &str, score: f64) -> ScoredMol<f64> {
        ScoredMol {
            canonical: CanonicalForm::from_test_str(canonical),
            graph: MolGraph::from_parts(vec![Atom::new(Element::C)], vec![]).unwrap(),
            score,
            eval_index: None,
        }
    }

    #[test]
    fn union_smaller_than_capacity_keeps_everything() {
        let p = Population::select(Population::new(5), vec![mol("A", 0.1), mol("B", 0.9)], 5);
        assert_eq!(p.len(), 2);
        assert_eq!(p.best().unwrap().score, 0.9);
    }

    #[test]
    fn greedy_top_k() {
        let current = Population::select(
            Population::new(2),
            vec![mol("A", 0.9), mol("B", 0.5)],
            2,
        );
        let next = Population::select(current, vec![mol("C", 0.7)], 2);
        let scores: Vec<f64> = next.ranked().iter().map(|m| m.score).collect();
        assert_eq!(scores, vec![0.9, 0.7]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let p = Population::select(
            Population::new(1),
            vec![mol("ZZ", 0.5), mol("AA", 0.5)],
            1,
        );
        assert_eq!(p.best().unwrap().canonical.as_str(), "AA");
    }

    #[test]
    fn duplicates_keep_first_occurrence() {
        let p = Population::select(
            Population::new(3),
            vec![mol("A", 0.5), mol("A", 0.5), mol("B", 0.1)],
            3,
        );
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn matches_bruteforce_sort_truncate() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..200);
            let cap = rng.gen_range(1..50);
            let items: Vec<ScoredMol<f64>> = (0..n)
                .map(|i| {
                    // duplicate names force dedup, coarse scores force ties
                    let name = format!("M{}", rng.gen_range(0..100u32));
                    let score = f64::from(rng.gen_range(0..10u32)) / 10.0;
                    let _ = i;
                    mol(&name, score)
                })
                .collect();
            let selected = Population::select(Population::new(cap), items.clone(), cap);

            let mut seen = std::collections::HashSet::new();
            let mut brute: Vec<(String, f64)> = items
                .iter()
                .filter(|m| seen.insert(m.canonical.as_str().to_string()))
                .map(|m| (m.canonical.as_str().to_string(), m.score))
                .collect();
            brute.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
            brute.truncate(cap);

            let got: Vec<(String, f64)> = selected
                .ranked()
                .iter()
                .map(|m| (m.canonical.as_str().to_string(), m.score))
                .collect();
            assert_eq!(got, brute);
        }
    }
}
