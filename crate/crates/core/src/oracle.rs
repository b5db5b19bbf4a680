//! Exhaustive grid search over customer coordinates.
//!
//! For any fixed buyer set, moving each quality down to the buyers' largest
//! requirement and the price up to their smallest budget never lowers profit,
//! so some optimum has its price drawn from customer prices and each quality
//! from customer requirements on that axis.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::market::{evaluate, Market, Product, Solution};

/// Largest number of `(grid point, customer)` checks the oracle will attempt.
pub const BRUTE_FORCE_GUARD: u128 = 400_000_000;

fn distinct_sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Exhaustive optimum over the candidate grid.
///
/// Among equal profits the lexicographically smallest `(p, q_1, .., q_d)`
/// wins, so the result is deterministic.
pub fn brute_force_optimum(market: &Market) -> Result<Solution> {
    let dim = market.dim();
    let customers = market.customers();
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| distinct_sorted(customers.iter().map(|c| c.qualities[k]).collect()))
        .collect();
    let prices = distinct_sorted(customers.iter().map(|c| c.price).collect());

    let grid = axes.iter().fold(prices.len() as u128, |acc, a| {
        acc.saturating_mul(a.len() as u128)
    });
    let work = grid.saturating_mul(customers.len() as u128);
    if work > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded {
            what: "brute-force oracle",
            size: work,
            limit: BRUTE_FORCE_GUARD,
        });
    }

    // For a fixed quality vector, profit at price p is
    // (p - cost) * #{buyers with budget >= p}; it is maximized at a buyer's
    // budget, so scanning the sorted budgets covers every grid price that can
    // win (non-buyer grid prices either match a budget's count with a lower
    // margin or sell nothing).
    let mut best: Option<(f64, Product)> = None;
    let mut consider = |profit: f64, product: Product| {
        let better = match &best {
            None => true,
            Some((bp, bprod)) => match profit.total_cmp(bp) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => product.lex_cmp(bprod) == Ordering::Less,
            },
        };
        if better {
            best = Some((profit, product));
        }
    };

    let mut index = vec![0usize; dim];
    let mut budgets: Vec<f64> = Vec::with_capacity(customers.len());
    'grid: loop {
        let qualities: Vec<f64> = index.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        let cost: f64 = qualities.iter().sum();
        budgets.clear();
        budgets.extend(
            customers
                .iter()
                .filter(|c| c.qualities.iter().zip(&qualities).all(|(r, q)| q >= r))
                .map(|c| c.price),
        );
        budgets.sort_by(|a, b| b.total_cmp(a));
        let mut t = 0;
        while t < budgets.len() {
            let price = budgets[t];
            while t + 1 < budgets.len() && budgets[t + 1] == price {
                t += 1;
            }
            let profit = (price - cost) * (t + 1) as f64;
            consider(
                profit,
                Product {
                    price,
                    qualities: qualities.clone(),
                },
            );
            t += 1;
        }

        for k in (0..dim).rev() {
            index[k] += 1;
            if index[k] < axes[k].len() {
                continue 'grid;
            }
            index[k] = 0;
        }
        break;
    }

    match best {
        Some((profit, product)) if profit > 0.0 => {
            // Re-derive through the public evaluator so the report is the
            // same arithmetic every other solver reports.
            let report = evaluate(market, &product)?;
            Ok(Solution::from_report(report))
        }
        _ => Ok(Solution::NoProfitableProduct),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Customer;

    fn market(rows: &[(f64, &[f64])]) -> Market {
        Market::new(
            rows.iter()
                .map(|(p, q)| Customer::new(*p, q.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Direct enumeration of the full grid including every grid price.
    fn naive(m: &Market) -> (f64, Product) {
        let cs = m.customers();
        let mut best: Option<(f64, Product)> = None;
        let prices: Vec<f64> = cs.iter().map(|c| c.price).collect();
        let dim = m.dim();
        let mut grids: Vec<Vec<f64>> = vec![vec![]];
        for k in 0..dim {
            let mut next = Vec::new();
            for g in &grids {
                for c in cs {
                    let mut g2 = g.clone();
                    g2.push(c.qualities[k]);
                    next.push(g2);
                }
            }
            grids = next;
        }
        for &pr in &prices {
            for q in &grids {
                let prod = Product::new(pr, q.clone()).unwrap();
                let r = evaluate(m, &prod).unwrap();
                let better = match &best {
                    None => true,
                    Some((bp, bprod)) => {
                        r.profit > *bp || (r.profit == *bp && prod.lex_cmp(bprod).is_lt())
                    }
                };
                if better {
                    best = Some((r.profit, prod));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn single_customer() {
        let m = market(&[(2.0, &[1.0])]);
        let r = brute_force_optimum(&m).unwrap();
        let r = r.report().unwrap();
        assert_eq!(r.profit, 1.0);
        assert_eq!(r.product, Product::new(2.0, vec![1.0]).unwrap());
    }

    #[test]
    fn two_customer_tie_break() {
        // (2,[0]), (2,[1]) and (3,[1]) all reach profit 2; (2,[0]) is
        // lexicographically smallest.
        let m = market(&[(3.0, &[1.0]), (2.0, &[0.0])]);
        let s = brute_force_optimum(&m).unwrap();
        let r = s.report().unwrap();
        assert_eq!(r.profit, 2.0);
        assert_eq!(r.product, Product::new(2.0, vec![0.0]).unwrap());
        assert_eq!(naive(&m), (2.0, r.product.clone()));
    }

    #[test]
    fn reduction_instance() {
        let m = market(&[(5.5, &[5.0]), (5.5, &[5.0]), (7.5, &[7.0])]);
        let r = brute_force_optimum(&m).unwrap();
        let r = r.report().unwrap();
        assert_eq!(r.profit, 1.0);
        assert_eq!(r.product, Product::new(5.5, vec![5.0]).unwrap());
    }

    #[test]
    fn unprofitable_market() {
        let m = market(&[(1.0, &[2.0]), (0.5, &[1.0])]);
        assert_eq!(
            brute_force_optimum(&m).unwrap(),
            Solution::NoProfitableProduct
        );
    }

    #[test]
    fn matches_full_grid_enumeration() {
        let m = market(&[
            (9.0, &[2.0, 3.0]),
            (8.0, &[3.0, 1.0]),
            (7.0, &[1.0, 2.0]),
            (11.0, &[4.0, 4.0]),
            (6.0, &[0.0, 1.0]),
        ]);
        let s = brute_force_optimum(&m).unwrap();
        let (profit, product) = naive(&m);
        assert_eq!(s.profit(), profit);
        assert_eq!(s.report().unwrap().product, product);
    }

    #[test]
    fn guard_trips() {
        let rows: Vec<Customer> = (0..200)
            .map(|i| {
                Customer::new(
                    1000.0 + i as f64,
                    vec![i as f64, 1000.0 - i as f64, i as f64],
                )
                .unwrap()
            })
            .collect();
        let m = Market::new(rows).unwrap();
        assert!(matches!(
            brute_force_optimum(&m),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
