//! `(1 - eps)`-approximation for any number of quality axes.
//!
//! Products are restricted to level hyperplanes `price - sum(q) = c_i` with
//! `c_i = r (1 - eps)^i`, where `r` is the best customer margin. On a level,
//! customer `j` considers exactly the products whose quality vector lies in
//! the homothet with corner `q_j` and size `ppu_j - c_i`, so the best product
//! on that level sits at a deepest point of those homothets.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{evaluate, Market, Product, ProfitReport, Solution};
use crate::simplex::{deepest_point_approx, deepest_point_sparse, SimplexHomothet};

/// Geometric schedule of level constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSchedule {
    pub r: f64,
    pub epsilon: f64,
    pub levels: Vec<f64>,
}

impl LevelSchedule {
    /// Index of the last level, `ceil(log_E n)` with `E = 1 / (1 - eps)`.
    pub fn last(&self) -> usize {
        self.levels.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMode {
    Exact,
    MonteCarlo,
}

/// Per-level diagnostics of one approximate solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub constant: f64,
    pub homothets: usize,
    pub depth: usize,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxOutcome {
    pub solution: Solution,
    pub schedule: Option<LevelSchedule>,
    pub levels: Vec<LevelReport>,
}

/// Largest customer margin.
pub fn max_ppu(market: &Market) -> f64 {
    market.best_customer().1
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Levels `r (1 - eps)^i` for `i = 0..=ceil(log_E n)`.
pub fn level_schedule(r: f64, epsilon: f64, n: usize) -> Result<LevelSchedule> {
    check_epsilon(epsilon)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::NonPositiveLevel(r));
    }
    let n = n.max(1) as f64;
    let raw = n.ln() / (1.0 / (1.0 - epsilon)).ln();
    // Exact powers such as n = 4, E = 2 must not round up to an extra level.
    let nearest = raw.round();
    let last = if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    } as usize;
    let levels = (0..=last)
        .map(|i| r * (1.0 - epsilon).powi(i as i32))
        .collect();
    Ok(LevelSchedule { r, epsilon, levels })
}

/// Homothets cut from the level `price - sum(q) = constant`, paired with the
/// index of the customer each came from. Customers with margin below the
/// level do not reach it and are skipped.
pub fn project_customers(market: &Market, constant: f64) -> Result<Vec<(usize, SimplexHomothet)>> {
    if constant.is_nan() || constant <= 0.0 {
        return Err(Error::NonPositiveLevel(constant));
    }
    Ok(market
        .customers()
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            let size = c.ppu() - constant;
            (size >= 0.0).then(|| {
                (
                    j,
                    SimplexHomothet {
                        corner: c.qualities.clone(),
                        size,
                    },
                )
            })
        })
        .collect())
}

/// The product on level `constant` with quality vector `x`.
pub fn lift_point(x: &[f64], constant: f64) -> Product {
    Product {
        price: constant + x.iter().sum::<f64>(),
        qualities: x.to_vec(),
    }
}

/// Splits a user epsilon into equal level and depth budgets whose composed
/// factor is exactly `1 - eps`.
pub fn split_epsilon(epsilon: f64) -> (f64, f64) {
    let part = 1.0 - (1.0 - epsilon).sqrt();
    (part, part)
}

struct Pick {
    level: usize,
    report: ProfitReport,
}

fn better(candidate: &Pick, best: &Option<Pick>) -> bool {
    match best {
        None => true,
        Some(b) => match candidate.report.profit.total_cmp(&b.report.profit) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                candidate.level < b.level
                    || (candidate.level == b.level
                        && candidate.report.product.lex_cmp(&b.report.product).is_lt())
            }
        },
    }
}

/// Approximate optimum.
///
/// Exact depth mode returns at least `(1 - eps_level) OPT`; Monte-Carlo mode
/// at least `(1 - eps) OPT` with high probability. Every reported profit is
/// re-evaluated against the market.
pub fn solve_approx(
    market: &Market,
    epsilon: f64,
    mode: DepthMode,
    seed: u64,
) -> Result<ApproxOutcome> {
    check_epsilon(epsilon)?;
    let (best_idx, r) = market.best_customer();
    if r <= 0.0 {
        return Ok(ApproxOutcome {
            solution: Solution::NoProfitableProduct,
            schedule: None,
            levels: Vec::new(),
        });
    }
    let (eps_level, eps_depth) = split_epsilon(epsilon);
    let schedule = level_schedule(r, eps_level, market.len())?;

    // The best customer's own point covers the case of very small optimal
    // margins.
    let mut best = None;
    let fallback = Pick {
        level: 0,
        report: evaluate(market, &market.customers()[best_idx].as_product())?,
    };
    if better(&fallback, &best) {
        best = Some(fallback);
    }

    let mut levels = Vec::with_capacity(schedule.levels.len());
    for (level, &constant) in schedule.levels.iter().enumerate() {
        let projected = project_customers(market, constant)?;
        let homothets: Vec<SimplexHomothet> = projected.iter().map(|(_, h)| h.clone()).collect();
        let found = match mode {
            DepthMode::Exact => deepest_point_sparse(&homothets)?,
            DepthMode::MonteCarlo => {
                let level_seed = seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                deepest_point_approx(&homothets, eps_depth, level_seed)?
            }
        };
        // Raising the price to the smallest budget among the containing
        // customers keeps every one of them and only adds margin.
        let lifted = lift_point(&found.point, constant);
        let budget = projected
            .iter()
            .filter(|(_, h)| h.contains_point(&found.point))
            .map(|&(j, _)| market.customers()[j].price)
            .fold(f64::INFINITY, f64::min);
        let product = if budget.is_finite() && budget > lifted.price {
            Product {
                price: budget,
                qualities: lifted.qualities,
            }
        } else {
            lifted
        };
        let report = evaluate(market, &product)?;
        levels.push(LevelReport {
            level,
            constant,
            homothets: homothets.len(),
            depth: found.depth,
            profit: report.profit,
        });
        let pick = Pick { level, report };
        if better(&pick, &best) {
            best = Some(pick);
        }
    }

    let solution = best.map_or(Solution::NoProfitableProduct, |p| {
        Solution::from_report(p.report)
    });
    Ok(ApproxOutcome {
        solution,
        schedule: Some(schedule),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_pareto_market;
    use crate::market::Customer;
    use crate::oracle::brute_force_optimum;

    fn market(rows: &[(f64, &[f64])]) -> Market {
        Market::new(
            rows.iter()
                .map(|(p, q)| Customer::new(*p, q.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn max_ppu_examples() {
        assert_eq!(max_ppu(&market(&[(3.0, &[1.0]), (2.0, &[0.0])])), 2.0);
        assert_eq!(max_ppu(&market(&[(2.0, &[1.0, 1.0])])), 0.0);
        assert_eq!(max_ppu(&market(&[(1.0, &[2.0])])), -1.0);
    }

    #[test]
    fn schedule_examples() {
        let s = level_schedule(8.0, 0.5, 4).unwrap();
        assert_eq!(s.levels, vec![8.0, 4.0, 2.0]);
        assert_eq!(s.last(), 2);
        assert_eq!(level_schedule(5.0, 0.5, 1).unwrap().levels, vec![5.0]);
        assert!(level_schedule(0.0, 0.5, 3).is_err());
        assert!(level_schedule(1.0, 1.0, 3).is_err());
        for (eps, n) in [(0.1, 1000), (0.25, 50), (0.9, 7)] {
            let s = level_schedule(3.0, eps, n).unwrap();
            assert!(s.levels.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
            // The last level reaches r / n.
            assert!(*s.levels.last().unwrap() <= 3.0 / n as f64 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn schedule_grows_as_epsilon_shrinks() {
        let mut prev = 0;
        for eps in [0.9, 0.5, 0.25, 0.1, 0.05, 0.01] {
            let len = level_schedule(1.0, eps, 100).unwrap().levels.len();
            assert!(len >= prev);
            prev = len;
        }
    }

    #[test]
    fn projection_examples() {
        let m = market(&[(10.0, &[2.0, 3.0])]);
        let h = project_customers(&m, 4.0).unwrap();
        assert_eq!(
            h[0].1,
            SimplexHomothet {
                corner: vec![2.0, 3.0],
                size: 1.0
            }
        );
        let h = project_customers(&m, 5.0).unwrap();
        assert_eq!(h[0].1.size, 0.0);
        assert!(project_customers(&m, 6.0).unwrap().is_empty());
    }

    #[test]
    fn lift_examples() {
        let p = lift_point(&[2.5, 3.2], 4.0);
        assert_eq!(p.price, 4.0 + (2.5 + 3.2));
        assert_eq!(p.qualities, vec![2.5, 3.2]);
        assert!((p.price - 9.7).abs() < 1e-12);
        let p = lift_point(&[0.0, 0.0, 0.0], 1.0);
        assert_eq!((p.price, p.ppu()), (1.0, 1.0));
    }

    #[test]
    fn split_composes_to_epsilon() {
        for eps in [0.01, 0.25, 0.5, 0.99] {
            let (a, b) = split_epsilon(eps);
            assert!(((1.0 - a) * (1.0 - b) - (1.0 - eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_example() {
        let m = market(&[(3.0, &[1.0]), (2.0, &[0.0])]);
        let out = solve_approx(&m, 0.5, DepthMode::Exact, 0).unwrap();
        assert!(out.solution.profit() >= 1.0);
        let r = out.solution.report().unwrap();
        assert_eq!(r, &evaluate(&m, &r.product).unwrap());
    }

    #[test]
    fn equal_margin_market_is_solved_exactly() {
        // All margins equal 2; two identical customers give OPT = 4 on level 0.
        let m = market(&[(4.0, &[1.0, 1.0]), (4.0, &[1.0, 1.0]), (5.0, &[2.0, 1.0])]);
        let opt = brute_force_optimum(&m).unwrap().profit();
        assert_eq!(opt, 4.0);
        for eps in [0.1, 0.5, 0.9] {
            let out = solve_approx(&m, eps, DepthMode::Exact, 0).unwrap();
            assert_eq!(out.solution.profit(), opt);
        }
    }

    #[test]
    fn unprofitable_market() {
        let m = market(&[(1.0, &[2.0]), (0.5, &[0.5])]);
        let out = solve_approx(&m, 0.3, DepthMode::MonteCarlo, 1).unwrap();
        assert_eq!(out.solution, Solution::NoProfitableProduct);
        assert!(solve_approx(&m, 1.5, DepthMode::Exact, 0).is_err());
    }

    #[test]
    fn level_guarantee_on_small_markets() {
        for seed in 0..30 {
            let dim = 1 + (seed as usize % 3);
            let n = 5 + (seed as usize * 3) % 20;
            let m = random_pareto_market(n, dim, seed, 0..=12).unwrap();
            let opt = brute_force_optimum(&m).unwrap().profit();
            let eps = 0.3;
            let (eps_level, _) = split_epsilon(eps);
            let schedule = level_schedule(max_ppu(&m), eps_level, m.len()).unwrap();
            let best_level = schedule
                .levels
                .iter()
                .map(|&c| {
                    let hs: Vec<SimplexHomothet> = project_customers(&m, c)
                        .unwrap()
                        .into_iter()
                        .map(|(_, h)| h)
                        .collect();
                    c * deepest_point_sparse(&hs).unwrap().depth as f64
                })
                .fold(max_ppu(&m), f64::max);
            assert!(best_level >= (1.0 - eps_level) * opt - 1e-9, "seed {seed}");
            let out = solve_approx(&m, eps, DepthMode::Exact, 0).unwrap();
            assert!(out.solution.profit() >= (1.0 - eps_level) * opt - 1e-9);
            assert!(out.solution.profit() <= opt);
        }
    }
}
