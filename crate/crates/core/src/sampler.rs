//! Rank-quantile parent sampling.
//!
//! A draw picks an exponent u on [min_exponent, 0], sets epsilon = 10^u and
//! selects uniformly among the top `ceil(epsilon * n)` ranks (floored at
//! one) of a ranked population. High ranks are therefore preferred, but the
//! selection depends only on rank, never on score values. Batches come in
//! two flavors: independent random draws, or a deterministic quasi
//! Monte-Carlo grid of u values (the default), using the midpoints of k
//! equal subintervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Random,
    QuasiGrid,
}

impl Default for SampleMode {
    fn default() -> SampleMode {
        SampleMode::QuasiGrid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub mode: SampleMode,
    /// Lower end of the exponent interval; epsilon spans [10^min_exponent, 1].
    pub min_exponent: f64,
}

impl Default for SamplerConfig {
    fn default() -> SamplerConfig {
        SamplerConfig {
            mode: SampleMode::QuasiGrid,
            min_exponent: -3.0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.min_exponent.is_finite() || self.min_exponent >= 0.0 {
            return Err(Error::Config(format!(
                "sampler.min_exponent must be negative, got {}",
                self.min_exponent
            )));
        }
        Ok(())
    }
}

/// One quantile draw: exponent, fraction, and the resulting rank pool size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileDraw<F: Scalar> {
    pub u: F,
    pub epsilon: F,
    pub pool_size: usize,
}

/// Builds a draw for a population of `n` from exponent `u`.
///
/// pool_size = max(1, ceil(epsilon * n)), clamped to n.
pub fn draw_from_exponent<F: Scalar>(n: usize, u: F) -> QuantileDraw<F> {
    let epsilon = F::from_config(10.0).powf(u);
    let scaled = (epsilon * F::from_count(n)).ceil();
    let pool = scaled.to_usize().unwrap_or(usize::MAX).clamp(1, n.max(1));
    QuantileDraw {
        u,
        epsilon,
        pool_size: pool,
    }
}

/// Independent draw with u uniform on [min_exponent, 0].
pub fn random_draw<F: Scalar, R: Rng>(n: usize, min_exponent: F, rng: &mut R) -> QuantileDraw<F> {
    let u = rng.gen_range(min_exponent..=F::zero());
    draw_from_exponent(n, u)
}

/// Midpoint grid of k exponents over [min_exponent, 0]:
/// u_i = min_exponent * (1 - (i + 0.5) / k).
pub fn grid_exponents<F: Scalar>(k: usize, min_exponent: F) -> Vec<F> {
    let kf = F::from_count(k);
    (0..k)
        .map(|i| {
            let frac = (F::from_count(i) + F::from_config(0.5)) / kf;
            min_exponent - min_exponent * frac
        })
        .collect()
}

/// Uniform choice among the top `pool_size` ranks of a ranked population.
///
/// The population is represented by its size; the returned value is a rank
/// index (0 = best).
pub fn sample_one<F: Scalar, R: Rng>(
    n: usize,
    draw: &QuantileDraw<F>,
    rng: &mut R,
) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    Ok(rng.gen_range(0..draw.pool_size.min(n)))
}

/// Samples `k` rank indices (repetition across draws allowed).
pub fn sample_batch<F: Scalar, R: Rng>(
    n: usize,
    k: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let min_exponent = F::from_config(config.min_exponent);
    let mut out = Vec::with_capacity(k);
    match config.mode {
        SampleMode::Random => {
            for _ in 0..k {
                let draw = random_draw::<F, R>(n, min_exponent, rng);
                out.push(sample_one(n, &draw, rng)?);
            }
        }
        SampleMode::QuasiGrid => {
            for u in grid_exponents(k, min_exponent) {
                let draw = draw_from_exponent(n, u);
                out.push(sample_one(n, &draw, rng)?);
            }
        }
    }
    Ok(out)
}

/// Exact selection probability of each rank under independent draws:
/// P(rank r) = E_u[ 1{r < pool(u)} / pool(u) ] with u uniform on
/// [min_exponent, 0]. The integrand is piecewise constant in u (pool sizes
/// are integer), so the integral is evaluated in closed form per piece.
/// Ranks are 0-based.
pub fn analytic_rank_distribution(n: usize, min_exponent: f64) -> Vec<f64> {
    let span = -min_exponent;
    let mut probs = vec![0.0f64; n];
    // u-interval where pool(u) == p: epsilon in ((p-1)/n, p/n], so
    // u in (log10((p-1)/n), log10(p/n)], intersected with [min_exponent, 0].
    for p in 1..=n {
        let hi = ((p as f64) / (n as f64)).log10().min(0.0);
        let lo = if p == 1 {
            f64::NEG_INFINITY
        } else {
            (((p - 1) as f64) / (n as f64)).log10()
        };
        let lo = lo.max(min_exponent);
        if hi <= lo {
            continue;
        }
        let weight = (hi - lo) / span / (p as f64);
        for rank in 0..p {
            probs[rank] += weight;
        }
    }
    probs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pool_size_boundaries() {
        // epsilon = 10^-3 on 1000 forces the single top rank
        let d = draw_from_exponent::<f64>(1000, -3.0);
        assert_eq!(d.pool_size, 1);
        // epsilon = 1 spans the whole population
        let d = draw_from_exponent::<f64>(1000, 0.0);
        assert_eq!(d.pool_size, 1000);
        // never empty, never above n
        let d = draw_from_exponent::<f64>(3, -9.0);
        assert_eq!(d.pool_size, 1);
    }

    #[test]
    fn grid_values_match_midpoint_formula() {
        let us = grid_exponents::<f64>(4, -3.0);
        let expected_u = [-2.625, -1.875, -1.125, -0.375];
        let expected_eps = [0.002371, 0.013335, 0.074989, 0.421697];
        for ((u, eu), ee) in us.iter().zip(expected_u).zip(expected_eps) {
            assert!((u - eu).abs() < 1e-12, "u {u} vs {eu}");
            let d = draw_from_exponent::<f64>(1000, *u);
            assert!((d.epsilon - ee).abs() < 1e-6, "eps {} vs {ee}", d.epsilon);
        }

        let us = grid_exponents::<f64>(1, -3.0);
        assert!((us[0] + 1.5).abs() < 1e-12);
        assert!((draw_from_exponent::<f64>(1000, us[0]).epsilon - 0.03162).abs() < 1e-5);
    }

    #[test]
    fn members_stay_within_their_pool() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = SamplerConfig::default();
        for _ in 0..200 {
            let u = rng.gen_range(-3.0..=0.0);
            let d = draw_from_exponent::<f64>(50, u);
            let r = sample_one(50, &d, &mut rng).unwrap();
            assert!(r < d.pool_size);
        }
        let batch = sample_batch::<f64, _>(50, 64, &config, &mut rng).unwrap();
        assert_eq!(batch.len(), 64);
        assert!(batch.iter().all(|&r| r < 50));
    }

    #[test]
    fn empty_population_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = SamplerConfig::default();
        assert!(matches!(
            sample_batch::<f64, _>(0, 4, &config, &mut rng),
            Err(Error::EmptyPopulation)
        ));
    }

    #[test]
    fn analytic_distribution_sums_to_one_and_decreases() {
        for n in [1usize, 7, 100, 1000] {
            let p = analytic_rank_distribution(n, -3.0);
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "n={n} sum={sum}");
            for w in p.windows(2) {
                assert!(w[0] >= w[1] - 1e-15);
            }
        }
    }

    #[test]
    fn random_mode_covers_all_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let config = SamplerConfig {
            mode: SampleMode::Random,
            min_exponent: -3.0,
        };
        let n = 20;
        let batch = sample_batch::<f64, _>(n, 20_000, &config, &mut rng).unwrap();
        let mut seen = vec![false; n];
        for r in batch {
            seen[r] = true;
        }
        assert!(seen.iter().all(|&s| s), "every rank reachable");
    }

    #[test]
    fn empirical_matches_analytic_coarsely() {
        let n = 100;
        let config = SamplerConfig {
            mode: SampleMode::Random,
            min_exponent: -3.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let draws = 200_000usize;
        let batch = sample_batch::<f64, _>(n, draws, &config, &mut rng).unwrap();
        let mut counts = vec![0usize; n];
        for r in batch {
            counts[r] += 1;
        }
        let probs = analytic_rank_distribution(n, -3.0);
        // coarse agreement on the head of the distribution
        for rank in 0..5 {
            let observed = counts[rank] as f64 / draws as f64;
            let expected = probs[rank];
            assert!(
                (observed - expected).abs() < 0.01,
                "rank {rank}: observed {observed:.4}, analytic {expected:.4}"
            );
        }
    }

    #[test]
    fn f32_grid_works() {
        let us = grid_exponents::<f32>(4, -3.0);
        assert_eq!(us.len(), 4);
        let d = draw_from_exponent::<f32>(100, us[0]);
        assert!(d.pool_size >= 1);
    }
}
