//! Intersection retrieval over a fixed set of homothets.
//!
//! Each homothet `(a, s)` is stored as the point `(a_1, .., a_d, sum a)` in a
//! `(d + 1)`-layer range tree. If it meets a probe `(b, t)` then for every
//! axis `b_k - s <= a_k <= b_k + t`, and `sum b - s <= sum a <= sum b + t`:
//! projections onto each facet normal must overlap. Homothets are grouped by
//! size (powers of two) so `s` can be replaced by the group's largest size
//! without flooding the box with far-away small homothets. Box hits are then
//! confirmed with the exact test.
//!
//! For `d <= 2` overlapping facet-normal projections already imply
//! intersection. From `d = 3` on they do not (corners `(0,0,0)` size 1 and
//! `(0.6,0.6,-5)` size 10 overlap on all four normals yet are disjoint), so
//! the exact confirmation is what makes the result correct.

use std::collections::BTreeMap;

use super::{check_dims, common_dim, SimplexHomothet};
use crate::error::Result;

#[derive(Debug, Clone)]
struct SizeClass {
    max_size: f64,
    ids: Vec<usize>,
    tree: super::RangeTree,
}

#[derive(Debug, Clone)]
pub struct IntersectionIndex {
    dim: usize,
    simplices: Vec<SimplexHomothet>,
    classes: Vec<SizeClass>,
}

fn size_class(size: f64) -> i32 {
    if size == 0.0 {
        i32::MIN
    } else {
        size.log2().floor() as i32
    }
}

/// Relative widening of the filter box so rounding in the box bounds can
/// never drop a pair the exact test accepts.
fn widen(lo: f64, hi: f64, scale: f64) -> (f64, f64) {
    let pad = 1e-9 * (1.0 + scale);
    (lo - pad, hi + pad)
}

impl IntersectionIndex {
    pub fn build(simplices: Vec<SimplexHomothet>) -> Result<Self> {
        let dim = common_dim(&simplices)?;
        let mut groups: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, s) in simplices.iter().enumerate() {
            groups.entry(size_class(s.size)).or_default().push(i);
        }
        let classes = groups
            .into_values()
            .map(|ids| {
                let points: Vec<Vec<f64>> = ids
                    .iter()
                    .map(|&i| {
                        let s = &simplices[i];
                        let mut p = s.corner.clone();
                        p.push(s.corner_sum());
                        p
                    })
                    .collect();
                let max_size = ids.iter().map(|&i| simplices[i].size).fold(0.0, f64::max);
                SizeClass {
                    max_size,
                    tree: super::RangeTree::build(dim + 1, &points),
                    ids,
                }
            })
            .collect();
        Ok(Self {
            dim,
            simplices,
            classes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[SimplexHomothet] {
        &self.simplices
    }

    /// Ids of every stored homothet meeting `probe`, ascending.
    pub fn query(&self, probe: &SimplexHomothet) -> Result<Vec<usize>> {
        check_dims(self.dim, probe.dim(), "probe")?;
        let mut out = Vec::new();
        self.query_into(probe, &mut out);
        Ok(out)
    }

    /// Like [`query`](Self::query) without the dimension check, reusing `out`.
    pub fn query_into(&self, probe: &SimplexHomothet, out: &mut Vec<usize>) {
        out.clear();
        let d = self.dim;
        let probe_sum = probe.corner_sum();
        let mut lo = vec![0.0; d + 1];
        let mut hi = vec![0.0; d + 1];
        let mut hits = Vec::new();
        for class in &self.classes {
            let m = class.max_size;
            for k in 0..d {
                let b = probe.corner[k];
                (lo[k], hi[k]) = widen(b - m, b + probe.size, b.abs() + m + probe.size);
            }
            (lo[d], hi[d]) = widen(
                probe_sum - m,
                probe_sum + probe.size,
                probe_sum.abs() + m + probe.size,
            );
            hits.clear();
            class.tree.query(&lo, &hi, &mut hits);
            out.extend(
                hits.iter()
                    .map(|&h| class.ids[h as usize])
                    .filter(|&i| self.simplices[i].meets(probe)),
            );
        }
        out.sort_unstable();
    }

    /// Number of stored homothets containing `point`.
    pub fn depth_at(&self, point: &[f64]) -> usize {
        let probe = SimplexHomothet {
            corner: point.to_vec(),
            size: 0.0,
        };
        let mut out = Vec::new();
        self.query_into(&probe, &mut out);
        out.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(corner: &[f64], size: f64) -> SimplexHomothet {
        SimplexHomothet::new(corner.to_vec(), size).unwrap()
    }

    #[test]
    fn examples() {
        let idx = IntersectionIndex::build(vec![s(&[0.0, 0.0], 1.0), s(&[2.0, 2.0], 1.0)]).unwrap();
        assert_eq!(idx.query(&s(&[0.5, 0.5], 1.0)).unwrap(), vec![0]);
        assert!(idx.query(&s(&[10.0, -10.0], 1.0)).unwrap().is_empty());
        assert_eq!(idx.query(&s(&[2.0, 2.0], 1.0)).unwrap(), vec![1]);
        assert!(idx.query(&s(&[2.0], 1.0)).is_err());
        assert!(IntersectionIndex::build(vec![]).is_err());
    }

    #[test]
    fn projection_overlap_is_not_enough_in_3d() {
        let a = s(&[0.0, 0.0, 0.0], 1.0);
        let b = s(&[0.6, 0.6, -5.0], 10.0);
        assert!(!a.meets(&b));
        let idx = IntersectionIndex::build(vec![b]).unwrap();
        assert!(idx.query(&a).unwrap().is_empty());
    }

    #[test]
    fn depth_at_counts_containers() {
        let idx = IntersectionIndex::build(vec![
            s(&[0.0, 0.0], 1.0),
            s(&[0.2, 0.0], 1.0),
            s(&[0.0, 0.2], 1.0),
            s(&[5.0, 5.0], 0.0),
        ])
        .unwrap();
        assert_eq!(idx.depth_at(&[0.2, 0.2]), 3);
        assert_eq!(idx.depth_at(&[5.0, 5.0]), 1);
        assert_eq!(idx.depth_at(&[0.9, 0.0]), 2);
    }

    fn arb_set(dim: usize) -> impl Strategy<Value = Vec<SimplexHomothet>> {
        prop::collection::vec(
            (
                prop::collection::vec(-40i32..40, dim),
                prop_oneof![Just(0i32), 0i32..30, 0i32..200],
            ),
            1..200,
        )
        .prop_map(|v| {
            v.into_iter()
                .map(|(c, sz)| SimplexHomothet {
                    corner: c.into_iter().map(|x| x as f64 / 4.0).collect(),
                    size: sz as f64 / 4.0,
                })
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn query_equals_filtered_scan(
            (set, probe_seed) in (1usize..=4).prop_flat_map(|d| (arb_set(d), 0usize..1000)),
        ) {
            let idx = IntersectionIndex::build(set.clone()).unwrap();
            let mut probe = set[probe_seed % set.len()].clone();
            probe.size *= 1.5;
            let got = idx.query(&probe).unwrap();
            let want: Vec<usize> = (0..set.len()).filter(|&i| set[i].meets(&probe)).collect();
            prop_assert_eq!(got, want);
        }
    }
}
