//! Deepest-point queries.
//!
//! If a point lies in every member of a set `S`, then the point whose `k`-th
//! coordinate is the largest `k`-th corner coordinate over `S` also lies in
//! all of `S`: it meets every lower bound and has the smallest coordinate sum
//! among such points. Hence a deepest point exists on the grid of per-axis
//! corner coordinates, and it is determined by at most `d` members of `S`
//! (one maximizer per axis), which pairwise intersect.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{common_dim, lex_cmp, point_key, IntersectionIndex, SimplexHomothet};
use crate::error::{Error, Result};

/// Largest `grid points x simplices` product scanned by
/// [`deepest_point_exact`].
pub const GRID_GUARD: u128 = 200_000_000;

/// Largest estimated number of candidate subsets visited by
/// [`deepest_point_sparse`].
pub const SPARSE_GUARD: u128 = 50_000_000;

/// Constant in the sampling rate `C ln(n + 1) / (eps^2 * guess)`.
const SAMPLE_RATE: f64 = 2.0;

/// A point and how many input homothets contain it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthResult {
    pub point: Vec<f64>,
    pub depth: usize,
    pub exact: bool,
}

/// Number of homothets containing `point`, by scan.
pub fn depth_at(simplices: &[SimplexHomothet], point: &[f64]) -> usize {
    simplices.iter().filter(|s| s.contains_point(point)).count()
}

fn better(depth: usize, point: &[f64], best: &Option<(usize, Vec<f64>)>) -> bool {
    match best {
        None => true,
        Some((d, p)) => depth > *d || (depth == *d && lex_cmp(point, p).is_lt()),
    }
}

/// Deepest point by scanning the whole corner grid. Ties go to the
/// lexicographically smallest point.
pub fn deepest_point_exact(simplices: &[SimplexHomothet]) -> Result<DepthResult> {
    let dim = common_dim(simplices)?;
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut v: Vec<f64> = simplices.iter().map(|s| s.corner[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let work = axes.iter().fold(simplices.len() as u128, |acc, a| {
        acc.saturating_mul(a.len() as u128)
    });
    if work > GRID_GUARD {
        return Err(Error::GuardExceeded {
            what: "grid deepest point",
            size: work,
            limit: GRID_GUARD,
        });
    }

    // Lexicographic enumeration with a strict improvement test keeps the
    // smallest optimal point.
    let mut best: Option<(usize, Vec<f64>)> = None;
    let mut index = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    'grid: loop {
        for k in 0..dim {
            point[k] = axes[k][index[k]];
        }
        let depth = depth_at(simplices, &point);
        if best.as_ref().is_none_or(|(d, _)| depth > *d) {
            best = Some((depth, point.clone()));
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
    let (depth, point) = best.expect("grid is nonempty");
    Ok(DepthResult {
        point,
        depth,
        exact: true,
    })
}

/// Deepest point over candidates generated from pairwise-intersecting
/// subsets of size at most `d`, found through an intersection index. Same
/// answer as [`deepest_point_exact`] (including tie-breaking) at a cost that
/// grows with the number of intersecting pairs rather than with `n^d`.
pub fn deepest_point_sparse(simplices: &[SimplexHomothet]) -> Result<DepthResult> {
    let dim = common_dim(simplices)?;
    let index = IntersectionIndex::build(simplices.to_vec())?;
    let n = simplices.len();

    let mut neighbours: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut buf = Vec::new();
    for (i, s) in simplices.iter().enumerate() {
        index.query_into(s, &mut buf);
        neighbours.push(buf.iter().copied().filter(|&j| j > i).collect());
    }

    let estimate: u128 = neighbours
        .iter()
        .map(|nb| (nb.len() as u128 + 1).saturating_pow(dim.saturating_sub(1) as u32))
        .fold(0u128, |a, b| a.saturating_add(b));
    if estimate > SPARSE_GUARD {
        return Err(Error::GuardExceeded {
            what: "sparse deepest point",
            size: estimate,
            limit: SPARSE_GUARD,
        });
    }

    let mut search = CliqueSearch {
        simplices,
        index: &index,
        neighbours: &neighbours,
        dim,
        seen: HashSet::new(),
        best: None,
        buf: Vec::new(),
        members: Vec::with_capacity(dim),
    };
    for (i, candidates) in neighbours.iter().enumerate() {
        search.members.push(i);
        search.extend(candidates);
        search.members.pop();
    }
    let (depth, point) = search.best.expect("at least one candidate");
    Ok(DepthResult {
        point,
        depth,
        exact: true,
    })
}

struct CliqueSearch<'a> {
    simplices: &'a [SimplexHomothet],
    index: &'a IntersectionIndex,
    neighbours: &'a [Vec<usize>],
    dim: usize,
    seen: HashSet<Vec<u64>>,
    best: Option<(usize, Vec<f64>)>,
    buf: Vec<usize>,
    members: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn visit(&mut self) {
        let point: Vec<f64> = (0..self.dim)
            .map(|k| {
                self.members
                    .iter()
                    .map(|&m| self.simplices[m].corner[k])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        if !self
            .members
            .iter()
            .all(|&m| self.simplices[m].contains_point(&point))
        {
            return;
        }
        if !self.seen.insert(point_key(&point)) {
            return;
        }
        let probe = SimplexHomothet {
            corner: point,
            size: 0.0,
        };
        self.index.query_into(&probe, &mut self.buf);
        let depth = self.buf.len();
        if better(depth, &probe.corner, &self.best) {
            self.best = Some((depth, probe.corner));
        }
    }

    /// `candidates` are ascending ids adjacent to every current member.
    fn extend(&mut self, candidates: &[usize]) {
        self.visit();
        if self.members.len() == self.dim {
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let next = intersect_sorted(&candidates[pos + 1..], &self.neighbours[v]);
            self.members.push(v);
            self.extend(&next);
            self.members.pop();
        }
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn round_seed(seed: u64, rung: u64, round: u64) -> u64 {
    // splitmix64 finalizer over the combined coordinates.
    let mut z = seed
        .wrapping_add(rung.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(round.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Approximate deepest point by sample-and-verify.
///
/// Walks a ladder of depth guesses `n, n/2, n/4, ..`. For each guess it draws
/// `ceil(log2(n + 1)) + 1` independent samples that keep each homothet with
/// probability `min(1, 2 ln(n + 1) / (eps^2 * guess))`, solves each sample
/// exactly, and re-counts the sample optimum's depth against the full input.
/// It stops at the first guess whose best verified depth reaches
/// `(1 - eps) * guess`; once the rate reaches 1 the full input is solved
/// exactly. The returned depth is always the true depth of the returned
/// point. With these constants the target failure rate is `n^-2` per call.
pub fn deepest_point_approx(
    simplices: &[SimplexHomothet],
    epsilon: f64,
    seed: u64,
) -> Result<DepthResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    common_dim(simplices)?;
    let n = simplices.len();
    let rounds = (n as f64 + 1.0).log2().ceil() as u64 + 1;
    let scale = SAMPLE_RATE * (n as f64 + 1.0).ln() / (epsilon * epsilon);

    let mut best: Option<(usize, Vec<f64>)> = None;
    let mut guess = n as f64;
    let mut rung = 0u64;
    loop {
        let rate = scale / guess;
        if rate >= 1.0 || guess < 1.0 {
            let full = deepest_point_sparse(simplices)?;
            if better(full.depth, &full.point, &best) {
                best = Some((full.depth, full.point));
            }
            break;
        }
        for round in 0..rounds {
            let mut rng = ChaCha8Rng::seed_from_u64(round_seed(seed, rung, round));
            let sample: Vec<SimplexHomothet> = simplices
                .iter()
                .filter(|_| rng.gen_bool(rate))
                .cloned()
                .collect();
            if sample.is_empty() {
                continue;
            }
            let local = deepest_point_sparse(&sample)?;
            let depth = depth_at(simplices, &local.point);
            if better(depth, &local.point, &best) {
                best = Some((depth, local.point));
            }
        }
        if let Some((depth, _)) = &best {
            if *depth as f64 >= (1.0 - epsilon) * guess {
                break;
            }
        }
        guess /= 2.0;
        rung += 1;
    }
    let (depth, point) = best.expect("ladder ends with an exact solve");
    Ok(DepthResult {
        point,
        depth,
        exact: false,
    })
}
