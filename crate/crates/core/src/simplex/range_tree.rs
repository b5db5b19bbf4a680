//! Static layered range tree for orthogonal range reporting.
//!
//! Layer `i` sorts its points by key `i`; each node of a non-final layer owns
//! an associated structure on the next key for the points below it. The last
//! key is answered by binary search on a sorted array. Small nodes skip the
//! associated structure and are filtered by scanning.

const LEAF: usize = 16;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct RangeTree {
    dims: usize,
    keys: Vec<f64>,
    root: Option<Layer>,
}

#[derive(Debug, Clone)]
struct Layer {
    axis: usize,
    ids: Vec<u32>,
    sorted: Vec<f64>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone)]
struct Node {
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    assoc: Option<Layer>,
}

impl RangeTree {
    /// Builds a tree over `points`, each a slice of `dims` keys. Point ids are
    /// positions in `points`.
    pub fn build<P: AsRef<[f64]>>(dims: usize, points: &[P]) -> Self {
        assert!(dims > 0, "range tree needs at least one key");
        let mut keys = Vec::with_capacity(points.len() * dims);
        for p in points {
            let p = p.as_ref();
            assert_eq!(p.len(), dims, "point arity");
            keys.extend_from_slice(p);
        }
        let ids: Vec<u32> = (0..points.len() as u32).collect();
        let root = (!ids.is_empty()).then(|| Layer::build(&keys, dims, ids, 0));
        Self { dims, keys, root }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.keys.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Appends the id of every point with `lo[i] <= key_i <= hi[i]` on all
    /// keys. Order of the output is unspecified.
    pub fn query(&self, lo: &[f64], hi: &[f64], out: &mut Vec<u32>) {
        assert_eq!(lo.len(), self.dims);
        assert_eq!(hi.len(), self.dims);
        if let Some(root) = &self.root {
            root.query(&self.keys, self.dims, lo, hi, out);
        }
    }
}

impl Layer {
    fn build(keys: &[f64], dims: usize, mut ids: Vec<u32>, axis: usize) -> Self {
        let key = |id: u32| keys[id as usize * dims + axis];
        ids.sort_unstable_by(|&a, &b| key(a).total_cmp(&key(b)));
        let sorted: Vec<f64> = ids.iter().map(|&id| key(id)).collect();
        let mut layer = Layer {
            axis,
            ids,
            sorted,
            nodes: Vec::new(),
        };
        if axis + 1 < dims {
            layer.build_node(keys, dims, 0, layer.ids.len());
        }
        layer
    }

    fn build_node(&mut self, keys: &[f64], dims: usize, lo: usize, hi: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo: lo as u32,
            hi: hi as u32,
            left: NONE,
            right: NONE,
            assoc: None,
        });
        if hi - lo > LEAF {
            let assoc = Layer::build(keys, dims, self.ids[lo..hi].to_vec(), self.axis + 1);
            let mid = lo + (hi - lo) / 2;
            let left = self.build_node(keys, dims, lo, mid);
            let right = self.build_node(keys, dims, mid, hi);
            let node = &mut self.nodes[id as usize];
            node.assoc = Some(assoc);
            node.left = left;
            node.right = right;
        }
        id
    }

    fn query(&self, keys: &[f64], dims: usize, lo: &[f64], hi: &[f64], out: &mut Vec<u32>) {
        let (klo, khi) = (lo[self.axis], hi[self.axis]);
        if klo > khi {
            return;
        }
        let i = self.sorted.partition_point(|&k| k < klo);
        let j = self.sorted.partition_point(|&k| k <= khi);
        if i >= j {
            return;
        }
        if self.axis + 1 == dims {
            out.extend_from_slice(&self.ids[i..j]);
            return;
        }
        self.visit(0, i, j, keys, dims, lo, hi, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        node: u32,
        i: usize,
        j: usize,
        keys: &[f64],
        dims: usize,
        lo: &[f64],
        hi: &[f64],
        out: &mut Vec<u32>,
    ) {
        let n = &self.nodes[node as usize];
        let (nlo, nhi) = (n.lo as usize, n.hi as usize);
        if nhi <= i || j <= nlo {
            return;
        }
        if i <= nlo && nhi <= j {
            if let Some(assoc) = &n.assoc {
                assoc.query(keys, dims, lo, hi, out);
                return;
            }
        }
        if n.left == NONE {
            let first = self.axis + 1;
            for &id in &self.ids[nlo.max(i)..nhi.min(j)] {
                let p = &keys[id as usize * dims..(id as usize + 1) * dims];
                if (first..dims).all(|a| lo[a] <= p[a] && p[a] <= hi[a]) {
                    out.push(id);
                }
            }
            return;
        }
        self.visit(n.left, i, j, keys, dims, lo, hi, out);
        self.visit(n.right, i, j, keys, dims, lo, hi, out);
    }
}
