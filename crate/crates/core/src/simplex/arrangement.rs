//! Arrangement statistics by incremental insertion in decreasing size order.
//!
//! A vertex here is a point where `d` facet hyperplanes drawn from at least
//! two different homothets meet in a single point lying on all of them (a
//! boundary/boundary crossing). Corners of a single homothet are not counted.

use std::collections::HashSet;

use serde::Serialize;

use super::{common_dim, deepest_point_sparse, point_key, IntersectionIndex, SimplexHomothet};
use crate::error::{Error, Result};

/// Largest estimated number of facet combinations tried while counting
/// vertices.
pub const VERTEX_GUARD: u128 = 200_000_000;

const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrangementStats {
    /// Distinct boundary crossing points; `None` outside `d` in `{2, 3}`.
    pub vertex_count: Option<usize>,
    pub max_depth: usize,
    pub pairwise_intersections: usize,
}

#[derive(Debug, Clone, Copy)]
enum Facet {
    /// `x_k = value`
    Axis(usize, f64),
    /// `sum x = value`
    Sum(f64),
}

fn facets(s: &SimplexHomothet) -> Vec<Facet> {
    let mut out: Vec<Facet> = s
        .corner
        .iter()
        .enumerate()
        .map(|(k, &a)| Facet::Axis(k, a))
        .collect();
    out.push(Facet::Sum(s.sum_limit()));
    out
}

/// Unique common point of `d` facet hyperplanes, if they are independent.
fn solve(chosen: &[Facet], dim: usize) -> Option<Vec<f64>> {
    let mut fixed: Vec<Option<f64>> = vec![None; dim];
    let mut sum = None;
    for f in chosen {
        match *f {
            Facet::Axis(k, v) => {
                if fixed[k].replace(v).is_some() {
                    return None;
                }
            }
            Facet::Sum(v) => {
                if sum.replace(v).is_some() {
                    return None;
                }
            }
        }
    }
    let free: Vec<usize> = (0..dim).filter(|&k| fixed[k].is_none()).collect();
    match (free.as_slice(), sum) {
        ([], None) => Some(fixed.into_iter().map(Option::unwrap).collect()),
        ([k], Some(total)) => {
            let rest: f64 = fixed.iter().flatten().sum();
            let mut p: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
            p[*k] = total - rest;
            Some(p)
        }
        _ => None,
    }
}

fn contains_with_tolerance(s: &SimplexHomothet, p: &[f64]) -> bool {
    let scale = 1.0 + s.size + s.corner.iter().map(|a| a.abs()).sum::<f64>();
    let tol = TOLERANCE * scale;
    let mut excess = 0.0;
    for (x, a) in p.iter().zip(&s.corner) {
        if *x < a - tol {
            return false;
        }
        excess += x - a;
    }
    excess <= s.size + tol
}

struct VertexCounter<'a> {
    simplices: &'a [SimplexHomothet],
    dim: usize,
    vertices: HashSet<Vec<u64>>,
}

impl VertexCounter<'_> {
    /// Adds every vertex formed by `inserted` together with at least one of
    /// `others`.
    fn add(&mut self, inserted: usize, others: &[usize]) {
        let own = facets(&self.simplices[inserted]);
        let mut chosen: Vec<(usize, Facet)> = Vec::with_capacity(self.dim);
        // At most d - 1 facets of the inserted homothet, the rest from others.
        for mask in 1u32..(1 << own.len()) {
            let take = mask.count_ones() as usize;
            if take >= self.dim {
                continue;
            }
            chosen.clear();
            for (i, f) in own.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    chosen.push((inserted, *f));
                }
            }
            self.fill(others, 0, &mut chosen);
        }
    }

    fn fill(&mut self, others: &[usize], from: usize, chosen: &mut Vec<(usize, Facet)>) {
        if chosen.len() == self.dim {
            self.record(chosen);
            return;
        }
        let need = self.dim - chosen.len();
        for pos in from..others.len() {
            let owner = others[pos];
            let fs = facets(&self.simplices[owner]);
            for mask in 1u32..(1 << fs.len()) {
                let take = mask.count_ones() as usize;
                if take > need {
                    continue;
                }
                let base = chosen.len();
                for (i, f) in fs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        chosen.push((owner, *f));
                    }
                }
                self.fill(others, pos + 1, chosen);
                chosen.truncate(base);
            }
        }
    }

    fn record(&mut self, chosen: &[(usize, Facet)]) {
        let planes: Vec<Facet> = chosen.iter().map(|&(_, f)| f).collect();
        let Some(point) = solve(&planes, self.dim) else {
            return;
        };
        let on_all = chosen
            .iter()
            .all(|&(owner, _)| contains_with_tolerance(&self.simplices[owner], &point));
        if on_all {
            self.vertices.insert(point_key(&point));
        }
    }
}

/// Inserts homothets largest first, retrieving the already inserted ones each
/// new homothet meets, and tallies intersecting pairs, boundary crossing
/// vertices (for `d` in `{2, 3}`) and the maximum depth.
pub fn arrangement_stats(simplices: &[SimplexHomothet]) -> Result<ArrangementStats> {
    let dim = common_dim(simplices)?;
    let index = IntersectionIndex::build(simplices.to_vec())?;
    let mut order: Vec<usize> = (0..simplices.len()).collect();
    order.sort_by(|&a, &b| {
        simplices[b]
            .size
            .total_cmp(&simplices[a].size)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0usize; simplices.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut predecessors: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    let mut buf = Vec::new();
    let mut pairs = 0usize;
    for &i in &order {
        index.query_into(&simplices[i], &mut buf);
        let pred: Vec<usize> = buf.iter().copied().filter(|&j| rank[j] < rank[i]).collect();
        pairs += pred.len();
        predecessors.push(pred);
    }

    let vertex_count = if dim == 2 || dim == 3 {
        let work: u128 = predecessors
            .iter()
            .map(|p| (p.len() as u128).saturating_pow(dim as u32 - 1))
            .fold(0u128, |a, b| a.saturating_add(b))
            .saturating_mul(((dim + 1) as u128).pow(dim as u32));
        if work > VERTEX_GUARD {
            return Err(Error::GuardExceeded {
                what: "arrangement vertex count",
                size: work,
                limit: VERTEX_GUARD,
            });
        }
        let mut counter = VertexCounter {
            simplices,
            dim,
            vertices: HashSet::new(),
        };
        for (&i, pred) in order.iter().zip(&predecessors) {
            counter.add(i, pred);
        }
        Some(counter.vertices.len())
    } else {
        None
    };

    let max_depth = deepest_point_sparse(simplices)?.depth;
    Ok(ArrangementStats {
        vertex_count,
        max_depth,
        pairwise_intersections: pairs,
    })
}
