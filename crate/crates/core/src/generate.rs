//! Seeded instance generators.

use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::{Customer, Market};
use crate::simplex::SimplexHomothet;

/// Random Pareto-optimal market with integer coordinates.
///
/// Qualities are drawn from `range`; each customer's price is its cost plus an
/// integer offset in `[0, range width]`. For `d = 1` prices and qualities are
/// sorted independently and paired, which keeps both nondecreasing together.
/// For `d > 1` draws that would dominate or be dominated by an accepted
/// customer are rejected. At least one customer has positive margin.
pub fn random_pareto_market(
    n: usize,
    dim: usize,
    seed: u64,
    range: RangeInclusive<i64>,
) -> Result<Market> {
    if n == 0 {
        return Err(Error::EmptyMarket);
    }
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let (lo, hi) = (*range.start(), *range.end().max(range.start()));
    let width = (hi - lo).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let customers = if dim == 1 {
        let mut qualities: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        let mut prices: Vec<i64> = qualities
            .iter()
            .map(|q| q + rng.gen_range(0..=width))
            .collect();
        qualities.sort_unstable();
        prices.sort_unstable();
        // The k-th smallest price is at least the k-th smallest quality, so a
        // zero total margin means every pair is tight.
        if prices.iter().zip(&qualities).all(|(p, q)| p <= q) {
            *prices.last_mut().unwrap() += 1;
        }
        prices
            .into_iter()
            .zip(qualities)
            .map(|(p, q)| Customer {
                price: p as f64,
                qualities: vec![q as f64],
            })
            .collect()
    } else {
        let mut accepted: Vec<Customer> = Vec::with_capacity(n);
        while accepted.len() < n {
            let qualities: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..=hi) as f64).collect();
            let low = i64::from(accepted.is_empty());
            let offset = rng.gen_range(low..=width) as f64;
            let candidate = Customer {
                price: qualities.iter().sum::<f64>() + offset,
                qualities,
            };
            let clashes = accepted
                .iter()
                .any(|c| c.dominates(&candidate) || candidate.dominates(c));
            if !clashes {
                accepted.push(candidate);
            }
        }
        accepted
    };
    Market::new(customers)
}

/// Market `{(x + 1/2, [x])}` built from an integer array. Its optimum is
/// exactly `1/2` when all values are distinct and at least `1` otherwise.
pub fn element_uniqueness_instance(values: &[i64]) -> Result<Market> {
    if values.is_empty() {
        return Err(Error::EmptyMarket);
    }
    let customers = values
        .iter()
        .map(|&x| Customer {
            price: x as f64 + 0.5,
            qualities: vec![x as f64],
        })
        .collect();
    Market::new(customers)
}

/// Planar homothets in groups of `k` translates sharing a common point, with
/// groups far apart. Maximum depth is `min(k, n)`.
pub fn clustered_homothets(n: usize, k: usize) -> Vec<SimplexHomothet> {
    let k = k.max(1);
    (0..n)
        .map(|i| {
            let (g, j) = ((i / k) as f64, (i % k) as f64);
            let base = g * 10.0 * k as f64;
            SimplexHomothet {
                corner: vec![base + j, -base + (k as f64 - 1.0 - j)],
                size: k as f64,
            }
        })
        .collect()
}

/// Planar homothets strung along one axis, each overlapping its `k - 1`
/// successors. Maximum depth is `min(k, n)`.
pub fn chained_homothets(n: usize, k: usize) -> Vec<SimplexHomothet> {
    let k = k.max(1);
    (0..n)
        .map(|i| SimplexHomothet {
            corner: vec![2.0 * i as f64, (i % 3) as f64 * 0.25],
            size: 2.0 * k as f64 - 1.0,
        })
        .collect()
}
