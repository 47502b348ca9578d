//! Balanced 3-d tree over Bloch-sphere points.

use crate::error::{Error, Result};
use crate::manifold::BlochPoint;

pub const DEFAULT_LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Nearest-neighbour index with exact results and lowest-index tie rule.
#[derive(Clone, Debug)]
pub struct NearestNeighborIndex {
    nodes: Vec<Node>,
    /// Points permuted into tree order, with their original index.
    points: Vec<([f64; 3], usize)>,
    leaf_size: usize,
}

/// Outcome of one query with its work counters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestNeighbor {
    pub index: usize,
    pub dist_sqr: f64,
    pub distance_evals: usize,
    pub comparisons: usize,
}

impl NearestNeighborIndex {
    pub fn build(points: &[BlochPoint], leaf_size: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot index an empty point set"));
        }
        if leaf_size == 0 {
            return Err(Error::InvalidConfig("leaf size must be positive".into()));
        }
        let mut tree = Self {
            nodes: Vec::new(),
            points: points.iter().enumerate().map(|(k, p)| (p.coords(), k)).collect(),
            leaf_size,
        };
        let n = tree.points.len();
        tree.build_node(0, n);
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= self.leaf_size {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let slice = &mut self.points[start..end];
        let axis = (0..3)
            .map(|a| {
                let (lo, hi) = slice
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0[a]), hi.max(p.0[a])));
                (a, hi - lo)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(a, _)| a)
            .expect("three axes");
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |p, q| p.0[axis].total_cmp(&q.0[axis]).then(p.1.cmp(&q.1)));
        let value = slice[mid].0[axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build_node(start, start + mid);
        let right = self.build_node(start + mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    /// Exact nearest point to `q`; equidistant points resolve to the lowest
    /// original index.
    pub fn nearest(&self, q: [f64; 3]) -> NearestNeighbor {
        let mut best = NearestNeighbor {
            index: usize::MAX,
            dist_sqr: f64::INFINITY,
            distance_evals: 0,
            comparisons: 0,
        };
        self.search(0, &q, &mut best);
        best
    }

    fn search(&self, node: usize, q: &[f64; 3], best: &mut NearestNeighbor) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for (p, k) in &self.points[start..end] {
                    let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                    best.distance_evals += 1;
                    best.comparisons += 1;
                    if d < best.dist_sqr || (d == best.dist_sqr && *k < best.index) {
                        best.dist_sqr = d;
                        best.index = *k;
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                best.comparisons += 1;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                best.comparisons += 1;
                if diff * diff <= best.dist_sqr {
                    self.search(far, q, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{real_normal, substream};

    fn random_points(n: usize, seed: u64) -> Vec<BlochPoint> {
        let mut rng = substream(seed, 0);
        (0..n)
            .map(|_| {
                let v = [real_normal(&mut rng), real_normal(&mut rng), real_normal(&mut rng)];
                let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                BlochPoint::new(v[0] / r, v[1] / r, v[2] / r).unwrap()
            })
            .collect()
    }

    fn linear_scan(points: &[BlochPoint], q: [f64; 3]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, p) in points.iter().enumerate() {
            let c = p.coords();
            let d = (c[0] - q[0]).powi(2) + (c[1] - q[1]).powi(2) + (c[2] - q[2]).powi(2);
            if d < best.1 {
                best = (k, d);
            }
        }
        best.0
    }

    #[test]
    fn matches_linear_scan() {
        for (n, leaf) in [(1, 4), (7, 1), (64, 4), (300, 8)] {
            let pts = random_points(n, n as u64);
            let tree = NearestNeighborIndex::build(&pts, leaf).unwrap();
            assert_eq!(tree.len(), n);
            for q in random_points(500, 99) {
                let r = tree.nearest(q.coords());
                assert_eq!(r.index, linear_scan(&pts, q.coords()));
            }
        }
    }

    #[test]
    fn ties_resolve_to_lower_index() {
        let pts = vec![
            BlochPoint::new(1.0, 0.0, 0.0).unwrap(),
            BlochPoint::new(0.0, 1.0, 0.0).unwrap(),
            BlochPoint::new(-1.0, 0.0, 0.0).unwrap(),
            BlochPoint::new(0.0, -1.0, 0.0).unwrap(),
        ];
        for leaf in [1, 2, 4] {
            let tree = NearestNeighborIndex::build(&pts, leaf).unwrap();
            assert_eq!(tree.nearest([0.0, 0.0, 1.0]).index, 0);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            assert_eq!(tree.nearest([-s, -s, 0.0]).index, 2);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NearestNeighborIndex::build(&[], 4).is_err());
        assert!(NearestNeighborIndex::build(&random_points(3, 1), 0).is_err());
    }
}
