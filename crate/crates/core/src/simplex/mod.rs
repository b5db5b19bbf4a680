//! Homothets of the standard simplex and depth queries over them.
//!
//! Every region here has the corner form
//! `{x : x_k >= a_k for all k, sum_k (x_k - a_k) <= s}`. Restricted to a level
//! hyperplane of fixed margin, each customer's consideration region is such a
//! homothet in quality coordinates, so "how many customers consider this
//! product" becomes "how many homothets contain this point".

mod arrangement;
mod depth;
mod index;
mod range_tree;

pub use arrangement::{arrangement_stats, ArrangementStats, VERTEX_GUARD};
pub use depth::{
    deepest_point_approx, deepest_point_exact, deepest_point_sparse, depth_at, DepthResult,
    GRID_GUARD, SPARSE_GUARD,
};
pub use index::IntersectionIndex;
pub use range_tree::RangeTree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed region `{x : x >= corner, sum(x - corner) <= size}`. Size zero is
/// the single point `corner`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexHomothet {
    pub corner: Vec<f64>,
    pub size: f64,
}

impl SimplexHomothet {
    pub fn new(corner: Vec<f64>, size: f64) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if corner.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite {
                what: "simplex corner".to_string(),
            });
        }
        if !size.is_finite() || size < 0.0 {
            return Err(Error::InvalidSize(size));
        }
        Ok(Self { corner, size })
    }

    /// Degenerate homothet at a single point.
    pub fn point(at: Vec<f64>) -> Result<Self> {
        Self::new(at, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn corner_sum(&self) -> f64 {
        self.corner.iter().sum()
    }

    /// Upper bound on `sum(x)` over the region.
    pub fn sum_limit(&self) -> f64 {
        self.corner_sum() + self.size
    }

    /// Membership without a dimension check.
    pub fn contains_point(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        let mut excess = 0.0;
        for (x, a) in point.iter().zip(&self.corner) {
            if x < a {
                return false;
            }
            excess += x - a;
        }
        excess <= self.size
    }

    /// Intersection test without a dimension check.
    ///
    /// The componentwise maximum of the two corners is the least point above
    /// both; the regions meet iff it satisfies both sum constraints.
    pub fn meets(&self, other: &SimplexHomothet) -> bool {
        debug_assert_eq!(other.dim(), self.dim());
        let joined: f64 = self
            .corner
            .iter()
            .zip(&other.corner)
            .map(|(a, b)| a.max(*b))
            .sum();
        joined <= self.sum_limit().min(other.sum_limit())
    }

    /// Vertices of the region (the corner and the corner pushed by `size`
    /// along each axis).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let mut out = vec![self.corner.clone()];
        for k in 0..self.dim() {
            let mut v = self.corner.clone();
            v[k] += self.size;
            out.push(v);
        }
        out
    }
}

fn check_dims(expected: usize, found: usize, what: &str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected,
            found,
            what: what.to_string(),
        });
    }
    Ok(())
}

/// Closed membership test.
pub fn contains(simplex: &SimplexHomothet, point: &[f64]) -> Result<bool> {
    check_dims(simplex.dim(), point.len(), "point")?;
    Ok(simplex.contains_point(point))
}

/// Closed intersection test.
pub fn intersects(a: &SimplexHomothet, b: &SimplexHomothet) -> Result<bool> {
    check_dims(a.dim(), b.dim(), "simplex")?;
    Ok(a.meets(b))
}

/// Checks that all simplices share one dimension and returns it.
fn common_dim(simplices: &[SimplexHomothet]) -> Result<usize> {
    let first = simplices.first().ok_or(Error::EmptyInput)?;
    let dim = first.dim();
    for (i, s) in simplices.iter().enumerate() {
        check_dims(dim, s.dim(), &format!("simplex {i}"))?;
    }
    Ok(dim)
}

/// Lexicographic comparison of two points.
fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Hashable bit pattern of a point, with `-0.0` folded into `0.0`.
fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|&x| (x + 0.0).to_bits()).collect()
}
