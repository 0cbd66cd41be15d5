//! Exact max-norm neighbor search: a kd-tree over row-major points with a
//! linear scan for small inputs.

use alloc::vec;
use alloc::vec::Vec;

const LEAF_SIZE: usize = 16;
/// Below this many points every query is answered by a linear scan.
pub(crate) const BRUTE_FORCE_BELOW: usize = 256;

struct Node {
    start: usize,
    end: usize,
    /// Child node indices; `usize::MAX` for leaves.
    left: usize,
    right: usize,
}

pub(crate) struct PointSet {
    dims: usize,
    /// Points in tree order, row-major.
    data: Vec<f64>,
    /// Original index of each stored point.
    index: Vec<usize>,
    nodes: Vec<Node>,
    /// Per-node bounding boxes: `dims` minima followed by `dims` maxima.
    bounds: Vec<f64>,
}

#[inline]
fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let v = (x - y).abs();
        if v > d {
            d = v;
        }
    }
    d
}

impl PointSet {
    /// Builds the search structure over `n` points of dimension `dims`
    /// gathered from `columns` (one slice per dimension).
    pub(crate) fn new(columns: &[&[f64]]) -> Self {
        let dims = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        let mut perm: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::new();
        let mut bounds = Vec::new();
        if n >= BRUTE_FORCE_BELOW {
            build(columns, &mut perm, 0, n, &mut nodes, &mut bounds);
        }
        let mut data = Vec::with_capacity(n * dims);
        for &p in &perm {
            data.extend(columns.iter().map(|c| c[p]));
        }
        Self {
            dims,
            data,
            index: perm,
            nodes,
            bounds,
        }
    }

    fn point(&self, pos: usize) -> &[f64] {
        &self.data[pos * self.dims..(pos + 1) * self.dims]
    }

    fn node_bounds(&self, node: usize) -> (&[f64], &[f64]) {
        let b = &self.bounds[node * 2 * self.dims..(node + 1) * 2 * self.dims];
        b.split_at(self.dims)
    }

    fn box_min_dist(&self, node: usize, q: &[f64]) -> f64 {
        let (lo, hi) = self.node_bounds(node);
        let mut d = 0.0f64;
        for i in 0..self.dims {
            let v = if q[i] < lo[i] {
                lo[i] - q[i]
            } else if q[i] > hi[i] {
                q[i] - hi[i]
            } else {
                0.0
            };
            if v > d {
                d = v;
            }
        }
        d
    }

    fn box_max_dist(&self, node: usize, q: &[f64]) -> f64 {
        let (lo, hi) = self.node_bounds(node);
        let mut d = 0.0f64;
        for i in 0..self.dims {
            let v = (q[i] - lo[i]).max(hi[i] - q[i]);
            if v > d {
                d = v;
            }
        }
        d
    }

    /// Distance from `q` to its `k`-th nearest stored point, ignoring points
    /// whose original index satisfies `skip`. `None` if fewer than `k` remain.
    pub(crate) fn kth_distance(&self, q: &[f64], k: usize, skip: &dyn Fn(usize) -> bool) -> Option<f64> {
        let mut best: Vec<f64> = Vec::with_capacity(k + 1);
        if self.nodes.is_empty() {
            for pos in 0..self.index.len() {
                if !skip(self.index[pos]) {
                    push_best(&mut best, k, max_dist(q, self.point(pos)));
                }
            }
        } else {
            self.knn_node(0, q, k, skip, &mut best);
        }
        (best.len() == k).then(|| best[k - 1])
    }

    fn knn_node(&self, node: usize, q: &[f64], k: usize, skip: &dyn Fn(usize) -> bool, best: &mut Vec<f64>) {
        let nd = &self.nodes[node];
        if nd.left == usize::MAX {
            for pos in nd.start..nd.end {
                if skip(self.index[pos]) {
                    continue;
                }
                let d = max_dist(q, self.point(pos));
                if best.len() < k || d < best[k - 1] {
                    push_best(best, k, d);
                }
            }
            return;
        }
        let (l, r) = (nd.left, nd.right);
        let dl = self.box_min_dist(l, q);
        let dr = self.box_min_dist(r, q);
        let (first, df, second, ds) = if dl <= dr { (l, dl, r, dr) } else { (r, dr, l, dl) };
        if best.len() < k || df < best[k - 1] {
            self.knn_node(first, q, k, skip, best);
        }
        if best.len() < k || ds < best[k - 1] {
            self.knn_node(second, q, k, skip, best);
        }
    }

    /// Number of stored points strictly closer than `radius` to `q`.
    pub(crate) fn count_within(&self, q: &[f64], radius: f64) -> usize {
        if self.nodes.is_empty() {
            return (0..self.index.len())
                .filter(|&pos| max_dist(q, self.point(pos)) < radius)
                .count();
        }
        self.count_node(0, q, radius)
    }

    fn count_node(&self, node: usize, q: &[f64], radius: f64) -> usize {
        if self.box_min_dist(node, q) >= radius {
            return 0;
        }
        let nd = &self.nodes[node];
        if self.box_max_dist(node, q) < radius {
            return nd.end - nd.start;
        }
        if nd.left == usize::MAX {
            return (nd.start..nd.end)
                .filter(|&pos| max_dist(q, self.point(pos)) < radius)
                .count();
        }
        self.count_node(nd.left, q, radius) + self.count_node(nd.right, q, radius)
    }
}

fn push_best(best: &mut Vec<f64>, k: usize, d: f64) {
    let pos = best.partition_point(|&b| b <= d);
    if pos >= k {
        return;
    }
    best.insert(pos, d);
    best.truncate(k);
}

fn build(
    columns: &[&[f64]],
    perm: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
    bounds: &mut Vec<f64>,
) -> usize {
    let dims = columns.len();
    let id = nodes.len();
    nodes.push(Node {
        start,
        end,
        left: usize::MAX,
        right: usize::MAX,
    });
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for &p in &perm[start..end] {
        for (d, c) in columns.iter().enumerate() {
            lo[d] = lo[d].min(c[p]);
            hi[d] = hi[d].max(c[p]);
        }
    }
    bounds.extend_from_slice(&lo);
    bounds.extend_from_slice(&hi);
    if end - start <= LEAF_SIZE {
        return id;
    }
    let split = (0..dims)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    if !(hi[split] > lo[split]) {
        // All points coincide; keep them in one leaf.
        return id;
    }
    let mid = start + (end - start) / 2;
    let col = columns[split];
    perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| col[a].total_cmp(&col[b]));
    let left = build(columns, perm, start, mid, nodes, bounds);
    let right = build(columns, perm, mid, end, nodes, bounds);
    nodes[id].left = left;
    nodes[id].right = right;
    id
}
