//! k-d tree for k-th nearest neighbour distances under the max-norm.

/// Points stored row-major: point `i` is `coords[i*dim..(i+1)*dim]`.
pub struct KdTree<'a> {
    coords: &'a [f64],
    dim: usize,
    /// Point indices, permuted so every node covers a contiguous range.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

const LEAF_SIZE: usize = 16;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl<'a> KdTree<'a> {
    pub fn new(coords: &'a [f64], dim: usize) -> Self {
        assert!(dim >= 1 && coords.len().is_multiple_of(dim), "coordinate buffer does not match dimension");
        let n = coords.len() / dim;
        let mut tree = KdTree { coords, dim, order: (0..n).collect(), nodes: Vec::new() };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split on the axis of widest spread
        let (coords, dim) = (self.coords, self.dim);
        let axis = (0..dim)
            .map(|ax| {
                let (lo, hi) =
                    self.order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                        let v = coords[i * dim + ax];
                        (lo.min(v), hi.max(v))
                    });
                (ax, hi - lo)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        let mid = start + (end - start) / 2;
        self.order[start..end]
            .select_nth_unstable_by(mid - start, |&a, &b| coords[a * dim + axis].total_cmp(&coords[b * dim + axis]));
        let value = coords[self.order[mid] * dim + axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    /// Distance from point `i` to its `k`-th nearest other point.
    /// Returns `None` when fewer than `k` other points exist.
    pub fn kth_neighbor_distance(&self, i: usize, k: usize) -> Option<f64> {
        if k == 0 || k >= self.len() {
            return None;
        }
        let mut best: Vec<f64> = Vec::with_capacity(k + 1);
        self.search(0, i, k, &mut best);
        best.get(k - 1).copied()
    }

    fn search(&self, node: usize, query: usize, k: usize, best: &mut Vec<f64>) {
        let q = self.point(query);
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == query {
                        continue;
                    }
                    let d = chebyshev(q, self.point(j));
                    if best.len() < k || d < best[best.len() - 1] {
                        let pos = best.partition_point(|&b| b <= d);
                        best.insert(pos, d);
                        best.truncate(k);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, k, best);
                // under the max-norm the slab distance bounds the far side exactly
                if best.len() < k || diff.abs() <= best[best.len() - 1] {
                    self.search(far, query, k, best);
                }
            }
        }
    }
}
