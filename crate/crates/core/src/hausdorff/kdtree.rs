//! Static k-d tree answering exact nearest-neighbour queries.

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    dim: usize,
    /// Points permuted into tree order, row-major.
    coords: Vec<f64>,
    /// Original index of each permuted row.
    ids: Vec<usize>,
    nodes: Vec<Node>,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KdTree {
    pub(crate) fn build(coords: &[f64], dim: usize) -> Self {
        debug_assert!(dim > 0 && coords.len() % dim == 0 && !coords.is_empty());
        let n = coords.len() / dim;
        let mut ids: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        Self::build_node(coords, dim, &mut ids, 0, &mut nodes);
        let mut permuted = Vec::with_capacity(coords.len());
        for &i in &ids {
            permuted.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        KdTree { dim, coords: permuted, ids, nodes }
    }

    fn build_node(coords: &[f64], dim: usize, ids: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
        let slot = nodes.len();
        if ids.len() <= LEAF_SIZE {
            nodes.push(Node::Leaf { start: offset, end: offset + ids.len() });
            return slot;
        }
        // Split on the axis of largest spread.
        let mut axis = 0;
        let mut best_spread = -1.0;
        for k in 0..dim {
            let (lo, hi) = ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = coords[i * dim + k];
                (lo.min(v), hi.max(v))
            });
            if hi - lo > best_spread {
                best_spread = hi - lo;
                axis = k;
            }
        }
        if best_spread <= 0.0 {
            // All points coincide.
            nodes.push(Node::Leaf { start: offset, end: offset + ids.len() });
            return slot;
        }
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        let value = coords[ids[mid] * dim + axis];
        nodes.push(Node::Leaf { start: 0, end: 0 });
        let (left_ids, right_ids) = ids.split_at_mut(mid);
        let left = Self::build_node(coords, dim, left_ids, offset, nodes);
        let right = Self::build_node(coords, dim, right_ids, offset + mid, nodes);
        nodes[slot] = Node::Split { axis, value, left, right };
        slot
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    /// Squared distance to, and original index of, the nearest point. Ties
    /// go to the lowest original index.
    pub(crate) fn nearest(&self, query: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(0, query, &mut best);
        best
    }

    /// Exact squared nearest distance whenever it exceeds `bound`. When some
    /// point lies within `bound` the search stops there and returns a value
    /// no larger than `bound`.
    pub(crate) fn nearest_beyond(&self, query: &[f64], bound: f64) -> f64 {
        let mut best = f64::INFINITY;
        self.search_beyond(0, query, bound, &mut best);
        best
    }

    fn search_beyond(&self, node: usize, query: &[f64], bound: f64, best: &mut f64) -> bool {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for row in start..end {
                    let d2 = squared_distance(query, &self.coords[row * self.dim..(row + 1) * self.dim]);
                    if d2 < *best {
                        *best = d2;
                        if d2 <= bound {
                            return true;
                        }
                    }
                }
                false
            }
            Node::Split { axis, value, left, right } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search_beyond(near, query, bound, best)
                    || (diff * diff < *best && self.search_beyond(far, query, bound, best))
            }
        }
    }

    fn search(&self, node: usize, query: &[f64], best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for row in start..end {
                    let p = &self.coords[row * self.dim..(row + 1) * self.dim];
                    let d2 = squared_distance(query, p);
                    let id = self.ids[row];
                    if d2 < best.0 || (d2 == best.0 && id < best.1) {
                        *best = (d2, id);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, best);
                // `<=` keeps equal-distance candidates reachable for the index tie-break.
                if diff * diff <= best.0 {
                    self.search(far, query, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_scan(coords: &[f64], dim: usize, q: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            let d2 = squared_distance(q, p);
            if d2 < best.0 {
                best = (d2, i);
            }
        }
        best
    }

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=6 {
            let coords: Vec<f64> = (0..500 * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tree = KdTree::build(&coords, dim);
            assert_eq!(tree.len(), 500);
            for _ in 0..300 {
                let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
                assert_eq!(tree.nearest(&q), linear_scan(&coords, dim, &q));
            }
        }
    }

    #[test]
    fn bounded_search_is_exact_above_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for dim in 1..=6 {
            let coords: Vec<f64> = (0..400 * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tree = KdTree::build(&coords, dim);
            for _ in 0..300 {
                let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let bound = rng.gen_range(0.0..0.3);
                let exact = linear_scan(&coords, dim, &q).0;
                let got = tree.nearest_beyond(&q, bound);
                if exact > bound {
                    assert_eq!(got, exact);
                } else {
                    assert!(got <= bound && got >= exact);
                }
            }
        }
    }

    #[test]
    fn duplicates_resolve_to_lowest_index() {
        let coords = vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let tree = KdTree::build(&coords, 2);
        assert_eq!(tree.nearest(&[1.0, 1.0]), (0.0, 0));
        assert_eq!(tree.nearest(&[0.0, 0.1]).1, 1);
    }
}
