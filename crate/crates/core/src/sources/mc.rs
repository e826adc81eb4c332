//! Monte Carlo estimates over blocklength-`n` sources.
//!
//! Randomness comes from ChaCha20 keyed by `(seed, stream)`; work is split
//! into fixed batches with one stream per batch, so results do not depend
//! on the thread count.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::types::{composition_count, TypeEngine};
use super::{block_ohe, SourceError};
use crate::budget::Budget;
use crate::dist::MixtureSpec;

const BATCH: usize = 1000;

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn batches(samples: usize) -> Vec<(u64, usize)> {
    (0..samples.div_ceil(BATCH))
        .map(|b| (b as u64, BATCH.min(samples - b * BATCH)))
        .collect()
}

/// Monte Carlo estimate of `H̄_S^ε(Xⁿ|Yⁿ)` (bits, not normalised) with its
/// standard error: `xⁿ` is sampled from the source and `h̄^ε(xⁿ)` is
/// computed exactly from the conditional type classes of `yⁿ` given `xⁿ`.
pub fn ohs_monte_carlo(
    spec: &MixtureSpec,
    n: usize,
    eps: f64,
    samples: usize,
    seed: u64,
    budget: &Budget,
) -> Result<(f64, f64), SourceError> {
    if samples < 2 {
        return Err(SourceError::InvalidParameter("need at least 2 samples".into()));
    }
    let engine = TypeEngine::new(spec, n);
    let per_x = composition_count(n, engine.ny());
    let worst = (0..engine.nx()).try_fold(1u128, |acc, _| acc.checked_mul(per_x)).unwrap_or(u128::MAX);
    if worst.min(engine.joint_type_count()) > budget.type_classes as u128 {
        return Err(SourceError::BudgetExceeded {
            needed: worst.min(engine.joint_type_count()),
            budget: budget.type_classes as u128,
        });
    }
    let weights = WeightedIndex::new(spec.weights()).map_err(|e| SourceError::InvalidParameter(e.to_string()))?;
    let x_laws: Vec<WeightedIndex<f64>> = spec
        .components()
        .iter()
        .map(|(_, p)| WeightedIndex::new(p.x_marginal().iter().copied()).expect("validated marginal"))
        .collect();
    let draws: Vec<Vec<u32>> = batches(samples)
        .into_par_iter()
        .flat_map_iter(|(stream, count)| {
            let mut rng = rng_for(seed, stream);
            (0..count)
                .map(|_| {
                    let law = &x_laws[weights.sample(&mut rng)];
                    let mut m = vec![0u32; engine.nx()];
                    for _ in 0..n {
                        m[law.sample(&mut rng)] += 1;
                    }
                    m
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut distinct: Vec<Vec<u32>> = draws.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let values: HashMap<Vec<u32>, f64> = distinct
        .into_par_iter()
        .map(|m| {
            let h = block_ohe(&engine, &m, eps, 0.0).0;
            (m, h)
        })
        .collect();
    let xs: Vec<f64> = draws.iter().map(|m| values[m]).collect();
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok((mean, (var / k).sqrt()))
}

/// Empirical quantiles of the normalised information density.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub n: usize,
    pub samples: usize,
    pub epsilon_tail: f64,
    /// Empirical `ε_tail` quantile of `(1/n)·(-log2 P(Xⁿ|Yⁿ))`.
    pub quantile_lo: f64,
    /// Empirical `1 - ε_tail` quantile.
    pub quantile_hi: f64,
    pub mean: f64,
    /// Sample standard deviation of the normalised density.
    pub std_dev: f64,
    pub seed: u64,
}

/// Draws `(xⁿ, yⁿ)` from the blocklength-`n` source and returns empirical
/// quantiles of `(1/n)·(-log2 P(xⁿ|yⁿ))`.
pub fn spectrum_quantiles(
    spec: &MixtureSpec,
    n: usize,
    eps_tail: f64,
    samples: usize,
    seed: u64,
) -> Result<SpectrumEstimate, SourceError> {
    if samples < 1000 {
        return Err(SourceError::InvalidParameter(format!("need at least 1000 samples, got {samples}")));
    }
    if !(0.0..0.5).contains(&eps_tail) || n == 0 {
        return Err(SourceError::InvalidParameter(format!(
            "need n ≥ 1 and ε_tail in [0, 0.5), got n={n}, ε_tail={eps_tail}"
        )));
    }
    let engine = TypeEngine::new(spec, n);
    let weights = WeightedIndex::new(spec.weights()).map_err(|e| SourceError::InvalidParameter(e.to_string()))?;
    let cell_laws: Vec<WeightedIndex<f64>> = spec
        .components()
        .iter()
        .map(|(_, p)| WeightedIndex::new(p.probs().iter().copied()).expect("validated pmf"))
        .collect();
    let cells = spec.nx() * spec.ny();
    let mut values: Vec<f64> = batches(samples)
        .into_par_iter()
        .flat_map_iter(|(stream, count)| {
            let mut rng = rng_for(seed, stream);
            let engine = &engine;
            (0..count)
                .map(|_| {
                    let law = &cell_laws[weights.sample(&mut rng)];
                    let mut c = vec![0u32; cells];
                    for _ in 0..n {
                        c[law.sample(&mut rng)] += 1;
                    }
                    engine.info_bits(&c) / n as f64
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let std_dev = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    values.sort_by(f64::total_cmp);
    let at = |q: f64| values[((q * k).floor() as usize).min(values.len() - 1)];
    Ok(SpectrumEstimate {
        n,
        samples,
        epsilon_tail: eps_tail,
        quantile_lo: at(eps_tail),
        quantile_hi: at(1.0 - eps_tail),
        mean,
        std_dev,
        seed,
    })
}
