//! Exact k-nearest-neighbour search over a kd-tree and the K-NN regression
//! estimate, with the sample-size driven choices of `k` and `tau`.
//!
//! Neighbours are ordered by squared Euclidean distance; exact distance ties
//! are broken by ascending insertion index so that results are reproducible
//! and identical to exhaustive search.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::model::{Label, LabeledSample};
use crate::scalar::{guarded_floor, Scalar};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// Immutable kd-tree over a fixed point list.
#[derive(Debug, Clone)]
pub struct NeighborIndex<T> {
    dim: usize,
    len: usize,
    /// Coordinates in insertion order.
    points: Vec<T>,
    /// Coordinates permuted into leaf order.
    leaf_points: Vec<T>,
    /// `perm[j]` is the insertion index of the `j`-th point in leaf order.
    perm: Vec<usize>,
    nodes: Vec<Node<T>>,
}

/// A neighbour: insertion index and squared distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub index: usize,
    pub dist2: T,
}

#[inline]
fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        acc += d * d;
    }
    acc
}

#[inline]
fn before<T: Scalar>(a: &Neighbor<T>, b: &Neighbor<T>) -> bool {
    a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index)
}

/// Bounded sorted candidate list.
struct Candidates<T> {
    k: usize,
    items: Vec<Neighbor<T>>,
}

impl<T: Scalar> Candidates<T> {
    fn new(k: usize, mut buf: Vec<Neighbor<T>>) -> Self {
        buf.clear();
        buf.reserve(k + 1);
        Self { k, items: buf }
    }

    #[inline]
    fn full(&self) -> bool {
        self.items.len() == self.k
    }

    #[inline]
    fn worst(&self) -> T {
        if self.full() {
            self.items[self.k - 1].dist2
        } else {
            T::infinity()
        }
    }

    #[inline]
    fn offer(&mut self, cand: Neighbor<T>) {
        if self.full() && !before(&cand, &self.items[self.k - 1]) {
            return;
        }
        let pos = self.items.partition_point(|c| before(c, &cand));
        self.items.insert(pos, cand);
        self.items.truncate(self.k);
    }
}

impl<T: Scalar> NeighborIndex<T> {
    /// Builds the index from a flat row-major buffer of `dim`-dimensional points.
    pub fn from_flat(dim: usize, coords: &[T]) -> Result<Self> {
        if dim == 0 {
            return Err(domain("dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::Empty("neighbour index points"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::Dimension {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("coordinates must be finite"));
        }
        let len = coords.len() / dim;
        let mut perm: Vec<usize> = (0..len).collect();
        let mut nodes = Vec::with_capacity(2 * len / LEAF_SIZE + 1);
        build(coords, dim, &mut perm, 0, len, &mut nodes);
        let mut leaf_points = Vec::with_capacity(coords.len());
        for &i in &perm {
            leaf_points.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        Ok(Self {
            dim,
            len,
            points: coords.to_vec(),
            leaf_points,
            perm,
            nodes,
        })
    }

    /// Builds the index from a list of points, all of the same dimension.
    pub fn build<P: AsRef<[T]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("neighbour index points"))?;
        let dim = first.as_ref().len();
        let mut flat = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.len(),
                });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, &flat)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// The `k` nearest stored points, closest first.
    pub fn k_nearest(&self, query: &[T], k: usize) -> Result<Vec<Neighbor<T>>> {
        let mut out = Vec::new();
        self.k_nearest_into(query, k, &mut out)?;
        Ok(out)
    }

    /// As [`k_nearest`](Self::k_nearest), reusing `out` as scratch space.
    pub fn k_nearest_into(&self, query: &[T], k: usize, out: &mut Vec<Neighbor<T>>) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: query.len(),
            });
        }
        if k == 0 {
            return Err(domain("k must be positive"));
        }
        if k > self.len {
            return Err(Error::TooFewPoints {
                k,
                available: self.len,
            });
        }
        let mut cands = Candidates::new(k, std::mem::take(out));
        let mut offsets = vec![T::zero(); self.dim];
        self.search(0, query, T::zero(), &mut offsets, &mut cands);
        *out = cands.items;
        Ok(())
    }

    fn search(&self, node: usize, q: &[T], rd: T, offsets: &mut [T], cands: &mut Candidates<T>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for j in start..end {
                    let p = &self.leaf_points[j * self.dim..(j + 1) * self.dim];
                    cands.offer(Neighbor {
                        index: self.perm[j],
                        dist2: dist2(q, p),
                    });
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < T::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, q, rd, offsets, cands);
                let old = offsets[dim];
                let far_rd = rd - old * old + diff * diff;
                // equal-distance points may still win on index, so prune strictly
                if far_rd <= cands.worst() {
                    offsets[dim] = diff;
                    self.search(far, q, far_rd, offsets, cands);
                    offsets[dim] = old;
                }
            }
        }
    }
}

fn build<T: Scalar>(
    coords: &[T],
    dim: usize,
    perm: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> usize {
    let id = nodes.len();
    nodes.push(Node::Leaf { start, end });
    if end - start <= LEAF_SIZE {
        return id;
    }
    let coord = |i: usize, d: usize| coords[i * dim + d];
    let slice = &mut perm[start..end];
    let mut split_dim = 0;
    let mut best_spread = T::neg_infinity();
    for d in 0..dim {
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for &i in slice.iter() {
            let v = coord(i, d);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            split_dim = d;
        }
    }
    if best_spread <= T::zero() {
        // all points coincide
        return id;
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        coord(a, split_dim)
            .partial_cmp(&coord(b, split_dim))
            .expect("finite coordinates")
    });
    let value = coord(slice[mid], split_dim);
    let left = build(coords, dim, perm, start, start + mid, nodes);
    let right = build(coords, dim, perm, start + mid, end, nodes);
    nodes[id] = Node::Split {
        dim: split_dim,
        value,
        left,
        right,
    };
    id
}

/// Exhaustive k-nearest search with the same ordering contract as the kd-tree.
pub fn brute_force_k_nearest<T: Scalar>(points: &[T], dim: usize, query: &[T], k: usize) -> Vec<Neighbor<T>> {
    let mut all: Vec<Neighbor<T>> = points
        .chunks_exact(dim)
        .enumerate()
        .map(|(index, p)| Neighbor {
            index,
            dist2: dist2(query, p),
        })
        .collect();
    all.sort_by(|a, b| {
        a.dist2
            .partial_cmp(&b.dist2)
            .expect("finite distances")
            .then(a.index.cmp(&b.index))
    });
    all.truncate(k);
    all
}

/// K-NN regression estimate `(1/k) sum_{i<=k} Y_(i)(x)`.
#[derive(Debug, Clone)]
pub struct KnnRegressor<T> {
    index: Arc<NeighborIndex<T>>,
    labels: Arc<Vec<Label>>,
    k: usize,
}

impl<T: Scalar> KnnRegressor<T> {
    pub fn new(index: Arc<NeighborIndex<T>>, labels: Vec<Label>, k: usize) -> Result<Self> {
        if labels.len() != index.len() {
            return Err(Error::Dimension {
                expected: index.len(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(domain("labels must be 0 or 1"));
        }
        if k == 0 {
            return Err(domain("k must be positive"));
        }
        if k > index.len() {
            return Err(Error::TooFewPoints {
                k,
                available: index.len(),
            });
        }
        Ok(Self {
            index,
            labels: Arc::new(labels),
            k,
        })
    }

    pub fn fit(sample: &LabeledSample<T>, k: usize) -> Result<Self> {
        let index = NeighborIndex::from_flat(sample.dim(), sample.coords())?;
        Self::new(Arc::new(index), sample.labels().to_vec(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn index(&self) -> &NeighborIndex<T> {
        &self.index
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Number of positive labels among the `k` nearest neighbours.
    pub fn positive_count(&self, query: &[T], scratch: &mut Vec<Neighbor<T>>) -> Result<usize> {
        self.index.k_nearest_into(query, self.k, scratch)?;
        Ok(scratch.iter().map(|n| usize::from(self.labels[n.index])).sum())
    }

    pub fn estimate(&self, query: &[T]) -> Result<T> {
        let mut scratch = Vec::new();
        let hits = self.positive_count(query, &mut scratch)?;
        Ok(T::of(hits as f64) / T::of(self.k as f64))
    }

    /// Estimates at every row of a flat query buffer.
    pub fn estimate_batch(&self, queries: &[T]) -> Result<Vec<T>> {
        let mut scratch = Vec::new();
        let denom = T::of(self.k as f64);
        queries
            .chunks_exact(self.index.dim())
            .map(|q| Ok(T::of(self.positive_count(q, &mut scratch)? as f64) / denom))
            .collect()
    }
}

/// `k_Q = floor(c_Q n_Q^(2 beta / (2 beta + d)))`, at least 1.
pub fn select_k_target(n_q: usize, beta: f64, d: usize, c_q: f64) -> usize {
    let e = 2.0 * beta / (2.0 * beta + d as f64);
    floor_at_one(c_q * (n_q as f64).powf(e))
}

/// `k_P = floor(c_P n_P^(2 gamma beta / (2 gamma beta + d)))`, at least 1.
pub fn select_k_source(n_p: usize, gamma: f64, beta: f64, d: usize, c_p: f64) -> usize {
    let gb = gamma * beta;
    let e = 2.0 * gb / (2.0 * gb + d as f64);
    floor_at_one(c_p * (n_p as f64).powf(e))
}

fn floor_at_one(v: f64) -> usize {
    guarded_floor(v).max(1.0) as usize
}

/// `tau = c_tau ln(max(n_Q, n_P)) / sqrt(k_Q)`.
pub fn select_tau_nonparam(n_q: usize, n_p: usize, k_q: usize, c_tau: f64) -> f64 {
    c_tau * (n_q.max(n_p) as f64).ln() / (k_q as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]]
    }

    #[test]
    fn single_point_index() {
        let idx = NeighborIndex::build(&[[0.25f64, 0.75]]).unwrap();
        let nn = idx.k_nearest(&[9.0, -3.0], 1).unwrap();
        assert_eq!(nn[0].index, 0);
    }

    #[test]
    fn build_errors() {
        let empty: Vec<[f64; 2]> = vec![];
        assert!(matches!(NeighborIndex::build(&empty), Err(Error::Empty(_))));
        let ragged: Vec<Vec<f64>> = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(NeighborIndex::build(&ragged), Err(Error::Dimension { .. })));
    }

    #[test]
    fn duplicates_are_both_retrievable() {
        let idx = NeighborIndex::build(&[[1.0f64, 1.0], [1.0, 1.0], [3.0, 3.0]]).unwrap();
        let nn = idx.k_nearest(&[1.0, 1.0], 2).unwrap();
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn hand_computed_neighbours() {
        let idx = NeighborIndex::build(&square()).unwrap();
        let nn = idx.k_nearest(&[0.0, 0.0], 3).unwrap();
        let d: Vec<f64> = nn.iter().map(|n| n.dist2).collect();
        assert_eq!(d, vec![0.0, 1.0, 1.0]);
        // equidistant pair: lower index first
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![0, 1, 2]);
        let all = idx.k_nearest(&[0.0, 0.0], 4).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(all[3].index, 3);
        assert!(matches!(idx.k_nearest(&[0.0, 0.0], 5), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn tie_rule_on_grid_matches_brute_force() {
        // an integer lattice produces many exact ties
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                pts.push((i % 7) as f64);
                pts.push((j % 5) as f64);
            }
        }
        let idx = NeighborIndex::from_flat(2, &pts).unwrap();
        for q in [[0.0, 0.0], [3.0, 2.0], [2.5, 2.5], [6.0, 4.0]] {
            for k in [1, 7, 31, 100] {
                let a = idx.k_nearest(&q, k).unwrap();
                let b = brute_force_k_nearest(&pts, 2, &q, k);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn knn_estimate_examples() {
        let idx = Arc::new(NeighborIndex::build(&square()).unwrap());
        let reg = KnnRegressor::new(idx.clone(), vec![1, 0, 1, 0], 3).unwrap();
        assert!((reg.estimate(&[0.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let ones = KnnRegressor::new(idx.clone(), vec![1, 1, 1, 1], 4).unwrap();
        assert_eq!(ones.estimate(&[2.0, 2.0]).unwrap(), 1.0);
        let one_nn = KnnRegressor::new(idx.clone(), vec![1, 0, 1, 0], 1).unwrap();
        assert_eq!(one_nn.estimate(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(one_nn.estimate(&[5.0, 5.0]).unwrap(), 0.0);
        assert!(KnnRegressor::new(idx, vec![1, 0, 1, 0], 5).is_err());
    }

    #[test]
    fn k_selection_examples() {
        assert_eq!(select_k_target(200, 1.0, 2, 1.0), 14);
        assert_eq!(select_k_target(1, 1.0, 2, 1.0), 1);
        assert_eq!(select_k_target(10_000, 1.0, 2, 1.0), 100);
        assert_eq!(select_k_source(1000, 1.0, 1.0, 2, 1.0), 31);
        assert_eq!(select_k_source(1000, 0.5, 1.0, 2, 1.0), 10);
        assert_eq!(select_k_source(1, 1.0, 1.0, 2, 1.0), 1);
    }

    #[test]
    fn tau_selection_examples() {
        let c = 0.05 * 31f64.sqrt() / 1000f64.ln();
        assert!((select_tau_nonparam(200, 1000, 31, c) - 0.05).abs() < 1e-15);
        let a = select_tau_nonparam(200, 1000, 9, 1.0);
        let b = select_tau_nonparam(200, 1000, 36, 1.0);
        assert!((a / b - 2.0).abs() < 1e-12);
        // ln(max) picks the larger sample
        assert!((select_tau_nonparam(1000, 10, 4, 2.0) - 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let pts: Vec<f32> = (0..200).map(|i| ((i * 37) % 101) as f32 / 101.0).collect();
        let idx = NeighborIndex::from_flat(2, &pts).unwrap();
        let q = [0.3f32, 0.6];
        assert_eq!(idx.k_nearest(&q, 9).unwrap(), brute_force_k_nearest(&pts, 2, &q, 9));
    }
}
