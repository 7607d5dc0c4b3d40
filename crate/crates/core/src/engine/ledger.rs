//! Budget accounting for oracle evaluations.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One charged oracle evaluation, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord<F: Scalar> {
    /// 1-based value of the budget counter when this call was made.
    pub eval_index: u64,
    pub canonical: String,
    pub score: F,
    pub operator: String,
    pub parents: Vec<String>,
}

/// Monotone counter of distinct oracle evaluations with a score cache.
///
/// A canonical form is never charged twice: cache hits return the stored
/// score without consuming budget. `used() == history.len()` and
/// `history.len() == cache.len()` always hold.
#[derive(Debug, Clone)]
pub struct BudgetLedger<F: Scalar> {
    limit: u64,
    history: Vec<EvalRecord<F>>,
    cache: HashMap<String, F>,
}

impl<F: Scalar> BudgetLedger<F> {
    pub fn new(limit: u64) -> BudgetLedger<F> {
        BudgetLedger {
            limit,
            history: Vec::new(),
            cache: HashMap::new(),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.history.len() as u64
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used()
    }

    pub fn is_exhausted(&self) -> bool {
        self.used() >= self.limit
    }

    pub fn history(&self) -> &[EvalRecord<F>] {
        &self.history
    }

    pub fn into_history(self) -> Vec<EvalRecord<F>> {
        self.history
    }

    pub fn cached(&self, canonical: &str) -> Option<F> {
        self.cache.get(canonical).copied()
    }

    /// Scores a molecule through the cache. Fresh evaluations are obtained
    /// from `evaluate`, must be finite, and consume one unit of budget;
    /// cached forms are free and return `None` as their eval index.
    pub fn score_with(
        &mut self,
        canonical: &str,
        operator: &str,
        parents: &[String],
        evaluate: impl FnOnce() -> Result<F>,
    ) -> Result<(F, Option<u64>)> {
        if let Some(score) = self.cached(canonical) {
            return Ok((score, None));
        }
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted);
        }
        let score = evaluate()?;
        Ok((score, Some(self.commit(canonical, operator, parents, score)?)))
    }

    /// Inserts a score into the cache without charging budget or recording
    /// history. Used when initial-population scoring is configured free;
    /// primed entries make the cache larger than the history.
    pub fn prime(&mut self, canonical: &str, score: F) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::Oracle(format!(
                "non-finite score {score} for {canonical}"
            )));
        }
        self.cache.insert(canonical.to_string(), score);
        Ok(())
    }

    /// Records a score computed elsewhere (used for parallel evaluation
    /// with ordered commits). The caller must have checked the cache.
    pub fn commit(
        &mut self,
        canonical: &str,
        operator: &str,
        parents: &[String],
        score: F,
    ) -> Result<u64> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted);
        }
        if !score.is_finite() {
            return Err(Error::Oracle(format!(
                "non-finite score {score} for {canonical}"
            )));
        }
        debug_assert!(!self.cache.contains_key(canonical));
        let eval_index = self.used() + 1;
        self.history.push(EvalRecord {
            eval_index,
            canonical: canonical.to_string(),
            score,
            operator: operator.to_string(),
            parents: parents.to_vec(),
        });
        self.cache.insert(canonical.to_string(), score);
        Ok(eval_index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_hits_are_free() {
        let mut ledger: BudgetLedger<f64> = BudgetLedger::new(10);
        let (s, idx) = ledger
            .score_with("CC", "init", &[], || Ok(0.5))
            .unwrap();
        assert_eq!((s, idx), (0.5, Some(1)));
        let (s, idx) = ledger
            .score_with("CC", "mutate", &[], || panic!("must not evaluate"))
            .unwrap();
        assert_eq!((s, idx), (0.5, None));
        assert_eq!(ledger.used(), 1);
        assert_eq!(ledger.history().len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let mut ledger: BudgetLedger<f64> = BudgetLedger::new(2);
        ledger.score_with("A", "init", &[], || Ok(0.0)).unwrap();
        ledger.score_with("B", "init", &[], || Ok(0.0)).unwrap();
        assert!(ledger.is_exhausted());
        assert!(matches!(
            ledger.score_with("D", "mutate", &[], || Ok(0.0)),
            Err(Error::BudgetExhausted)
        ));
        // cached forms stay free after exhaustion
        let (_, idx) = ledger
            .score_with("A", "mutate", &[], || panic!("cached"))
            .unwrap();
        assert_eq!(idx, None);
        assert_eq!(ledger.used(), 2);
    }

    #[test]
    fn non_finite_scores_rejected() {
        let mut ledger: BudgetLedger<f64> = BudgetLedger::new(2);
        assert!(matches!(
            ledger.score_with("A", "init", &[], || Ok(f64::NAN)),
            Err(Error::Oracle(_))
        ));
        assert_eq!(ledger.used(), 0);
    }

    #[test]
    fn history_matches_cache() {
        let mut ledger: BudgetLedger<f64> = BudgetLedger::new(100);
        for i in 0..30 {
            let name = format!("M{}", i % 10);
            let _ = ledger.score_with(&name, "x", &[], || Ok(i as f64));
        }
        assert_eq!(ledger.history().len(), 10);
        assert_eq!(ledger.used(), 10);
        for (i, rec) in ledger.history().iter().enumerate() {
            assert_eq!(rec.eval_index, i as u64 + 1);
        }
    }
}
