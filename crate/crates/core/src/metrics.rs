//! Evaluation metrics: validity/uniqueness/novelty for generated batches,
//! and the budget-normalized area under the running top-10 mean for
//! optimization histories.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::molgraph::CanonicalForm;
use crate::scalar::Scalar;

/// Counts and fractions for one generation batch.
///
/// validity = valid / generated; uniqueness = unique / valid;
/// novelty = novel / unique (unique canonical forms absent from the
/// reference set). Fractions with a zero denominator report 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub n_generated: usize,
    pub n_valid: usize,
    pub n_unique: usize,
    pub n_novel: usize,
    pub validity: f64,
    pub uniqueness: f64,
    pub novelty: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Computes the generation metrics for a batch of parse/build outcomes
/// (`None` marks an invalid molecule) against a reference set of canonical
/// forms.
pub fn generation_metrics(
    generated: &[Option<CanonicalForm>],
    reference: &BTreeSet<String>,
) -> GenerationReport {
    let n_generated = generated.len();
    let valid: Vec<&CanonicalForm> = generated.iter().flatten().collect();
    let n_valid = valid.len();
    let unique: BTreeSet<&str> = valid.iter().map(|c| c.as_str()).collect();
    let n_unique = unique.len();
    let n_novel = unique
        .iter()
        .filter(|c| !reference.contains(**c))
        .count();
    GenerationReport {
        n_generated,
        n_valid,
        n_unique,
        n_novel,
        validity: ratio(n_valid, n_generated),
        uniqueness: ratio(n_unique, n_valid),
        novelty: ratio(n_novel, n_unique),
    }
}

/// AUC of the running top-10 mean over an evaluation budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AucReport<F: Scalar> {
    pub auc_top10: F,
    pub final_top10_mean: F,
    /// t_i for i = 1..=budget: mean of the 10 best scores among the first i
    /// evaluations (all of them when i < 10), held flat past the end of a
    /// short history.
    pub curve: Vec<F>,
}

/// Computes the running top-10 mean curve and its budget-normalized area.
///
/// Requires a nonempty history no longer than the budget. The curve is
/// nondecreasing from the tenth evaluation on (the top-10 window only ever
/// improves once it is full); before that it is a plain prefix mean and
/// may wobble.
pub fn auc_top10<F: Scalar>(history: &[F], budget: usize) -> Result<AucReport<F>> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    if history.len() > budget {
        return Err(Error::Config(format!(
            "history length {} exceeds budget {budget}",
            history.len()
        )));
    }
    let mut top: Vec<F> = Vec::with_capacity(10); // descending
    let mut curve: Vec<F> = Vec::with_capacity(budget);
    for &score in history {
        let pos = top.partition_point(|&t| t >= score);
        if pos < 10 {
            top.insert(pos, score);
            top.truncate(10);
        }
        // summed in descending order so an independent recomputation that
        // sorts and sums the same way is bit-identical
        let sum = top.iter().fold(F::zero(), |acc, &t| acc + t);
        curve.push(sum / F::from_count(top.len()));
    }
    let last = *curve.last().expect("nonempty history");
    curve.resize(budget, last);
    let auc = curve.iter().fold(F::zero(), |acc, &t| acc + t) / F::from_count(budget);
    Ok(AucReport {
        auc_top10: auc,
        final_top10_mean: last,
        curve,
    })
}

/// Fixed-width table row for generation metrics.
pub fn render_generation_row(label: &str, report: &GenerationReport) -> String {
    format!(
        "| {label:<24} | validity {:>7.2}% | uniqueness {:>7.2}% | novelty {:>7.2}% | n={} |",
        report.validity * 100.0,
        report.uniqueness * 100.0,
        report.novelty * 100.0,
        report.n_generated,
    )
}

/// Fixed-width table row for an optimization run.
pub fn render_auc_row<F: Scalar>(label: &str, report: &AucReport<F>) -> String {
    format!(
        "| {label:<24} | auc_top10 {:.4} | final_top10 {:.4} |",
        report.auc_top10, report.final_top10_mean,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canon(s: &str) -> CanonicalForm {
        crate::smiles::parse(s).unwrap().canonical_form().unwrap()
    }

    #[test]
    fn all_valid_unique_novel() {
        let generated = vec![Some(canon("C")), Some(canon("CC")), Some(canon("CCC"))];
        let report = generation_metrics(&generated, &BTreeSet::new());
        assert_eq!(
            (report.validity, report.uniqueness, report.novelty),
            (1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn generated_equal_to_reference_has_zero_novelty() {
        let generated = vec![Some(canon("C")), Some(canon("CC"))];
        let reference: BTreeSet<String> = generated
            .iter()
            .flatten()
            .map(|c| c.as_str().to_string())
            .collect();
        let report = generation_metrics(&generated, &reference);
        assert_eq!(report.novelty, 0.0);
        assert_eq!(report.uniqueness, 1.0);
    }

    #[test]
    fn mixed_batch_counts() {
        let generated = vec![
            Some(canon("C")),
            Some(canon("C")),
            None,
            Some(canon("CC")),
        ];
        let reference: BTreeSet<String> = [canon("CC").as_str().to_string()].into();
        let report = generation_metrics(&generated, &reference);
        assert_eq!(report.n_generated, 4);
        assert_eq!(report.n_valid, 3);
        assert_eq!(report.n_unique, 2);
        assert_eq!(report.n_novel, 1);
        assert_eq!(report.validity, 0.75);
        assert_eq!(report.uniqueness, 2.0 / 3.0);
        assert_eq!(report.novelty, 0.5);
    }

    #[test]
    fn empty_batch_reports_zeroes() {
        let report = generation_metrics(&[], &BTreeSet::new());
        assert_eq!(report.n_generated, 0);
        assert_eq!(report.validity, 0.0);
    }

    #[test]
    fn matches_naive_set_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let names: Vec<CanonicalForm> = ["C", "CC", "CCC", "CO", "CN", "CCN"]
            .iter()
            .map(|s| canon(s))
            .collect();
        for _ in 0..50 {
            let generated: Vec<Option<CanonicalForm>> = (0..rng.gen_range(0..200))
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        None
                    } else {
                        Some(names[rng.gen_range(0..names.len())].clone())
                    }
                })
                .collect();
            let reference: BTreeSet<String> = names
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|c| c.as_str().to_string())
                .collect();
            let report = generation_metrics(&generated, &reference);

            // naive recomputation
            let valid: Vec<&CanonicalForm> = generated.iter().flatten().collect();
            let unique: BTreeSet<String> =
                valid.iter().map(|c| c.as_str().to_string()).collect();
            let novel: BTreeSet<String> = unique
                .iter()
                .filter(|c| !reference.contains(*c))
                .cloned()
                .collect();
            assert_eq!(report.n_valid, valid.len());
            assert_eq!(report.n_unique, unique.len());
            assert_eq!(report.n_novel, novel.len());
        }
    }

    #[test]
    fn constant_history_gives_constant_auc() {
        // 0.25 sums exactly in binary floating point
        let history = vec![0.25f64; 25];
        let report = auc_top10(&history, 25).unwrap();
        assert_eq!(report.auc_top10, 0.25);
        assert_eq!(report.final_top10_mean, 0.25);

        let history = vec![0.4f64; 25];
        let report = auc_top10(&history, 25).unwrap();
        assert!((report.auc_top10 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn two_point_example() {
        let report = auc_top10(&[0.0f64, 1.0], 2).unwrap();
        assert_eq!(report.curve, vec![0.0, 0.5]);
        assert_eq!(report.auc_top10, 0.25);
    }

    #[test]
    fn flat_extension_past_short_history() {
        let report = auc_top10(&[1.0f64], 4).unwrap();
        assert_eq!(report.curve, vec![1.0; 4]);
        assert_eq!(report.auc_top10, 1.0);
    }

    #[test]
    fn bounded_by_max_and_monotone_once_saturated() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let n = rng.gen_range(1..300);
            let budget = n + rng.gen_range(0..50);
            let history: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let report = auc_top10(&history, budget).unwrap();
            let max = history.iter().cloned().fold(f64::MIN, f64::max);
            assert!(report.auc_top10 <= max + 1e-12);
            // the top-10 window only improves once it is full; before that
            // the curve is a prefix mean and may wobble
            for w in report.curve.windows(2).skip(9) {
                assert!(w[1] >= w[0], "saturated top-10 mean must not decrease");
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            auc_top10::<f64>(&[], 5),
            Err(Error::EmptyHistory)
        ));
        assert!(auc_top10(&[0.0f64; 6], 5).is_err());
    }

    #[test]
    fn rendering_is_stable() {
        let report = auc_top10(&[0.25f64, 0.5], 2).unwrap();
        let row = render_auc_row("demo", &report);
        assert!(row.contains("auc_top10 0.3125"));
    }
}
