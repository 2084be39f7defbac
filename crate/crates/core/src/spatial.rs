//! Insert-only kd-tree with exact nearest and k-nearest queries in ℝ^d.
//!
//! Ties between equidistant points are broken by insertion index (lowest
//! first), so query results are a pure function of the inserted sequence.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "kd-tree dimension must be positive");
        KdTree { dim, coords: Vec::new(), nodes: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    /// Inserts a point and returns its index (insertion order).
    pub fn insert(&mut self, p: &[f64]) -> usize {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        let index = self.nodes.len();
        self.coords.extend_from_slice(p);
        if index == 0 {
            self.nodes.push(Node { point: 0, axis: 0, left: None, right: None });
            return 0;
        }
        let mut cur = 0;
        loop {
            let node = &self.nodes[cur];
            let go_left = p[node.axis] < self.coords[node.point * self.dim + node.axis];
            let next = if go_left { node.left } else { node.right };
            match next {
                Some(n) => cur = n,
                None => {
                    let axis = (node.axis + 1) % self.dim;
                    self.nodes.push(Node { point: index, axis, left: None, right: None });
                    let parent = &mut self.nodes[cur];
                    if go_left {
                        parent.left = Some(index);
                    } else {
                        parent.right = Some(index);
                    }
                    return index;
                }
            }
        }
    }

    fn dist2(&self, index: usize, q: &[f64]) -> f64 {
        self.point(index)
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Nearest point as `(index, squared distance)`.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        self.k_nearest(q, 1).first().copied()
    }

    /// Up to `k` nearest points sorted by `(distance, index)`.
    pub fn k_nearest(&self, q: &[f64], k: usize) -> Vec<(usize, f64)> {
        assert_eq!(q.len(), self.dim, "query dimension mismatch");
        if k == 0 || self.nodes.is_empty() {
            return Vec::new();
        }
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let mut stack: Vec<(usize, f64)> = vec![(0, 0.0)];
        while let Some((n, bound)) = stack.pop() {
            if heap.len() == k && bound > heap.peek().unwrap().dist2 {
                continue;
            }
            let node = &self.nodes[n];
            let cand = Candidate { dist2: self.dist2(node.point, q), index: node.point };
            if heap.len() < k {
                heap.push(cand);
            } else if cand < *heap.peek().unwrap() {
                heap.pop();
                heap.push(cand);
            }
            let diff = q[node.axis] - self.coords[node.point * self.dim + node.axis];
            let (near, far) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
            // Far side first on the stack so the near side is explored first.
            if let Some(f) = far {
                stack.push((f, diff * diff));
            }
            if let Some(c) = near {
                stack.push((c, 0.0));
            }
        }
        let mut out: Vec<Candidate> = heap.into_vec();
        out.sort();
        out.into_iter().map(|c| (c.index, c.dist2)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(points: &[Vec<f64>], q: &[f64], k: usize) -> Vec<(usize, f64)> {
        let mut all: Vec<(usize, f64)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()))
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    #[test]
    fn empty_tree() {
        let t = KdTree::new(3);
        assert!(t.nearest(&[0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn ties_pick_lowest_index() {
        let mut t = KdTree::new(2);
        t.insert(&[1.0, 0.0]);
        t.insert(&[-1.0, 0.0]);
        t.insert(&[0.0, 1.0]);
        assert_eq!(t.nearest(&[0.0, 0.0]), Some((0, 1.0)));
        let k = t.k_nearest(&[0.0, 0.0], 3);
        assert_eq!(k.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn duplicate_points() {
        let mut t = KdTree::new(2);
        for _ in 0..5 {
            t.insert(&[0.5, 0.5]);
        }
        assert_eq!(t.nearest(&[0.5, 0.5]), Some((0, 0.0)));
        assert_eq!(t.k_nearest(&[0.0, 0.0], 10).len(), 5);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            dim in 1usize..7,
            raw in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..120),
            q in prop::collection::vec(-6.0f64..6.0, 6),
            k in 1usize..8,
        ) {
            let pts: Vec<Vec<f64>> = raw.iter().map(|p| p[..dim].to_vec()).collect();
            let mut t = KdTree::new(dim);
            for p in &pts {
                t.insert(p);
            }
            let q = &q[..dim];
            prop_assert_eq!(t.k_nearest(q, k), brute(&pts, q, k));
        }

        #[test]
        fn grid_ties_agree(k in 1usize..10, qx in 0i32..6, qy in 0i32..6) {
            // many exact ties on an integer lattice
            let mut pts = Vec::new();
            for x in 0..5 {
                for y in 0..5 {
                    pts.push(vec![x as f64, y as f64]);
                }
            }
            let mut t = KdTree::new(2);
            for p in &pts {
                t.insert(p);
            }
            let q = [qx as f64 - 0.5, qy as f64];
            prop_assert_eq!(t.k_nearest(&q, k), brute(&pts, &q, k));
        }
    }
}
