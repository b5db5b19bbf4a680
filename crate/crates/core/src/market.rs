//! Customers, products, and the profit model.
//!
//! A customer `(p_i, q_i)` considers a product `(p, q)` when `p <= p_i` and
//! `q_k >= q_{i,k}` on every axis. The unit cost of a product is the sum of
//! its qualities, so its profit per unit is `p - sum(q)`, and its profit is
//! that margin times the number of considering customers.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A customer: the price they currently pay and their minimum requirement on
/// every quality axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub price: f64,
    pub qualities: Vec<f64>,
}

/// A candidate product: a price and the quality delivered on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub price: f64,
    pub qualities: Vec<f64>,
}

fn check_point(price: f64, qualities: &[f64], what: &str) -> Result<()> {
    if qualities.is_empty() {
        return Err(Error::ZeroDimension);
    }
    if !price.is_finite() || qualities.iter().any(|q| !q.is_finite()) {
        return Err(Error::NonFinite {
            what: what.to_string(),
        });
    }
    Ok(())
}

/// Margin of a (price, qualities) point.
fn margin(price: f64, qualities: &[f64]) -> f64 {
    price - qualities.iter().sum::<f64>()
}

impl Customer {
    pub fn new(price: f64, qualities: Vec<f64>) -> Result<Self> {
        check_point(price, &qualities, "customer")?;
        Ok(Self { price, qualities })
    }

    pub fn dim(&self) -> usize {
        self.qualities.len()
    }

    /// Profit per unit of this customer's own point, i.e. of the cheapest
    /// product that exactly meets their requirements.
    pub fn ppu(&self) -> f64 {
        margin(self.price, &self.qualities)
    }

    /// Closed consideration test.
    pub fn considers(&self, product: &Product) -> bool {
        product.price <= self.price
            && product
                .qualities
                .iter()
                .zip(&self.qualities)
                .all(|(offered, required)| offered >= required)
    }

    /// True when `self` has strictly higher requirements on every axis and a
    /// strictly lower price than `other`, which makes `other` inconsistent
    /// with a saturated market.
    pub fn dominates(&self, other: &Customer) -> bool {
        self.price < other.price
            && self
                .qualities
                .iter()
                .zip(&other.qualities)
                .all(|(mine, theirs)| mine > theirs)
    }

    /// The product sitting exactly on this customer's point.
    pub fn as_product(&self) -> Product {
        Product {
            price: self.price,
            qualities: self.qualities.clone(),
        }
    }
}

impl Product {
    pub fn new(price: f64, qualities: Vec<f64>) -> Result<Self> {
        check_point(price, &qualities, "product")?;
        Ok(Self { price, qualities })
    }

    pub fn dim(&self) -> usize {
        self.qualities.len()
    }

    pub fn cost(&self) -> f64 {
        self.qualities.iter().sum()
    }

    pub fn ppu(&self) -> f64 {
        margin(self.price, &self.qualities)
    }

    /// Lexicographic order on `(price, q_1, .., q_d)`.
    pub fn lex_cmp(&self, other: &Product) -> Ordering {
        self.price.total_cmp(&other.price).then_with(|| {
            self.qualities
                .iter()
                .zip(&other.qualities)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Profit per unit sold: price minus the sum of qualities. May be negative.
pub fn ppu(product: &Product) -> f64 {
    product.ppu()
}

/// One pair that breaks Pareto optimality: `customer` is dominated by
/// `dominated_by` (the latter asks for strictly more on every axis while
/// paying strictly less).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoViolation {
    pub customer: usize,
    pub dominated_by: usize,
}

impl ParetoViolation {
    pub fn pair(&self) -> (usize, usize) {
        (self.customer, self.dominated_by)
    }
}

/// A validated, Pareto-optimal set of customers sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    customers: Vec<Customer>,
    dim: usize,
}

impl Market {
    /// Builds a market, rejecting it if any customer is dominated.
    pub fn new(customers: Vec<Customer>) -> Result<Self> {
        let dim = check_shape(&customers)?;
        if has_dominated(&customers, dim) {
            return Err(Error::NotPareto(validate_pareto(&customers)?));
        }
        Ok(Self { customers, dim })
    }

    /// Builds a market, dropping every dominated customer instead of
    /// rejecting. Returns the market and the number of dropped customers.
    pub fn pruned(customers: Vec<Customer>) -> Result<(Self, usize)> {
        let dim = check_shape(&customers)?;
        let flags = dominated_flags(&customers, dim);
        let before = customers.len();
        let kept: Vec<Customer> = customers
            .into_iter()
            .zip(flags)
            .filter_map(|(c, dominated)| (!dominated).then_some(c))
            .collect();
        if kept.is_empty() {
            return Err(Error::AllPruned);
        }
        let removed = before - kept.len();
        Ok((
            Self {
                customers: kept,
                dim,
            },
            removed,
        ))
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    /// Largest customer margin, with the index of the first customer
    /// attaining it.
    pub fn best_customer(&self) -> (usize, f64) {
        let mut best = (0, self.customers[0].ppu());
        for (i, c) in self.customers.iter().enumerate().skip(1) {
            let m = c.ppu();
            if m > best.1 {
                best = (i, m);
            }
        }
        best
    }

    pub fn into_customers(self) -> Vec<Customer> {
        self.customers
    }
}

fn check_shape(customers: &[Customer]) -> Result<usize> {
    let first = customers.first().ok_or(Error::EmptyMarket)?;
    let dim = first.dim();
    for (i, c) in customers.iter().enumerate() {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
                what: format!("customer {i}"),
            });
        }
        check_point(c.price, &c.qualities, &format!("customer {i}"))?;
    }
    Ok(dim)
}

/// `flags[j]` is true when some other customer dominates customer `j`.
fn dominated_flags(customers: &[Customer], dim: usize) -> Vec<bool> {
    if dim == 1 {
        return dominated_flags_1d(customers);
    }
    customers
        .iter()
        .map(|c| customers.iter().any(|other| other.dominates(c)))
        .collect()
}

/// Sort by price, sweep upward, and compare each customer against the largest
/// requirement seen at strictly lower prices.
fn dominated_flags_1d(customers: &[Customer]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..customers.len()).collect();
    order.sort_by(|&a, &b| customers[a].price.total_cmp(&customers[b].price));
    let mut flags = vec![false; customers.len()];
    let mut lower_max = f64::NEG_INFINITY;
    let mut start = 0;
    while start < order.len() {
        let price = customers[order[start]].price;
        let mut end = start;
        while end < order.len() && customers[order[end]].price == price {
            end += 1;
        }
        for &i in &order[start..end] {
            flags[i] = lower_max > customers[i].qualities[0];
        }
        for &i in &order[start..end] {
            lower_max = lower_max.max(customers[i].qualities[0]);
        }
        start = end;
    }
    flags
}

fn has_dominated(customers: &[Customer], dim: usize) -> bool {
    if dim == 1 {
        dominated_flags_1d(customers).into_iter().any(|f| f)
    } else {
        customers
            .iter()
            .any(|c| customers.iter().any(|other| other.dominates(c)))
    }
}

/// Lists every violating pair `(j, i)` where customer `i` dominates `j`.
/// An empty list means the customers form a valid market.
pub fn validate_pareto(customers: &[Customer]) -> Result<Vec<ParetoViolation>> {
    check_shape(customers)?;
    let mut out = Vec::new();
    for (j, c) in customers.iter().enumerate() {
        for (i, other) in customers.iter().enumerate() {
            if other.dominates(c) {
                out.push(ParetoViolation {
                    customer: j,
                    dominated_by: i,
                });
            }
        }
    }
    Ok(out)
}

/// Drops dominated customers. Thin wrapper over [`Market::pruned`].
pub fn prune_dominated(customers: Vec<Customer>) -> Result<Market> {
    Market::pruned(customers).map(|(m, _)| m)
}

/// A product together with its margin, buyer count and profit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitReport {
    pub product: Product,
    pub ppu: f64,
    pub buyers: usize,
    pub profit: f64,
}

/// Result of an optimizer. Markets whose best customer margin is not
/// positive admit no product with positive profit.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Profitable(ProfitReport),
    NoProfitableProduct,
}

impl Solution {
    pub fn profit(&self) -> f64 {
        match self {
            Solution::Profitable(r) => r.profit,
            Solution::NoProfitableProduct => 0.0,
        }
    }

    pub fn report(&self) -> Option<&ProfitReport> {
        match self {
            Solution::Profitable(r) => Some(r),
            Solution::NoProfitableProduct => None,
        }
    }

    /// Wraps a report, mapping non-positive profit to the no-profit marker.
    pub fn from_report(report: ProfitReport) -> Self {
        if report.profit > 0.0 {
            Solution::Profitable(report)
        } else {
            Solution::NoProfitableProduct
        }
    }
}

/// Counts the customers considering `product` and its resulting profit.
pub fn evaluate(market: &Market, product: &Product) -> Result<ProfitReport> {
    if product.dim() != market.dim() {
        return Err(Error::DimensionMismatch {
            expected: market.dim(),
            found: product.dim(),
            what: "product".to_string(),
        });
    }
    let buyers = market
        .customers()
        .iter()
        .filter(|c| c.considers(product))
        .count();
    let ppu = product.ppu();
    Ok(ProfitReport {
        product: product.clone(),
        ppu,
        buyers,
        profit: ppu * buyers as f64,
    })
}
