use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{dist2, PointCloud};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;
const NO_CHILD: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Node {
    lo: usize,
    hi: usize,
    left: usize,
    right: usize,
    /// Smallest per-point offset in the subtree (0 for plain neighbor search).
    min_offset: f64,
}

/// Bounding-box kd-tree over an arbitrary-dimension point set.
///
/// Every point may carry a non-negative additive offset; the tree then answers
/// `min_i |x - p_i|^2 + offset_i` exactly, which is what a power distance with
/// non-positive weights needs.
#[derive(Clone, Debug)]
pub(crate) struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    offsets: Vec<f64>,
    perm: Vec<usize>,
    nodes: Vec<Node>,
    // 2 * dim values per node: lower corner then upper corner.
    boxes: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl KdTree {
    pub(crate) fn new(dim: usize, coords: Vec<f64>, offsets: Vec<f64>) -> Self {
        let n = coords.len() / dim;
        debug_assert_eq!(offsets.len(), n);
        let mut tree = Self {
            dim,
            coords,
            offsets,
            perm: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            boxes: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    #[inline]
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, lo: usize, hi: usize) -> usize {
        let dim = self.dim;
        let mut bmin = vec![f64::INFINITY; dim];
        let mut bmax = vec![f64::NEG_INFINITY; dim];
        let mut min_offset = f64::INFINITY;
        for &i in &self.perm[lo..hi] {
            let p = &self.coords[i * dim..(i + 1) * dim];
            for a in 0..dim {
                bmin[a] = bmin[a].min(p[a]);
                bmax[a] = bmax[a].max(p[a]);
            }
            min_offset = min_offset.min(self.offsets[i]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            left: NO_CHILD,
            right: NO_CHILD,
            min_offset,
        });
        self.boxes.extend_from_slice(&bmin);
        self.boxes.extend_from_slice(&bmax);

        let (axis, extent) = (0..dim)
            .map(|a| (a, bmax[a] - bmin[a]))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((0, 0.0));
        if hi - lo <= LEAF_SIZE || extent <= 0.0 {
            return id;
        }
        let mid = lo + (hi - lo) / 2;
        let coords = &self.coords;
        self.perm[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        let left = self.build(lo, mid);
        let right = self.build(mid, hi);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    /// Squared distance from `x` to the bounding box of `node`.
    #[inline]
    fn box_dist2(&self, node: usize, x: &[f64]) -> f64 {
        let b = &self.boxes[2 * self.dim * node..2 * self.dim * (node + 1)];
        let (bmin, bmax) = b.split_at(self.dim);
        let mut acc = 0.0;
        for a in 0..self.dim {
            let d = if x[a] < bmin[a] {
                bmin[a] - x[a]
            } else if x[a] > bmax[a] {
                x[a] - bmax[a]
            } else {
                0.0
            };
            acc += d * d;
        }
        acc
    }

    /// The `k` nearest points ordered by `(squared distance, index)`.
    pub(crate) fn knn(&self, x: &[f64], k: usize) -> Vec<(f64, usize)> {
        let k = k.min(self.perm.len());
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(0, x, k, &mut heap);
        let mut out: Vec<_> = heap.into_iter().map(|c| (c.dist2, c.index)).collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn knn_visit(&self, node: usize, x: &[f64], k: usize, heap: &mut BinaryHeap<Candidate>) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            for &i in &self.perm[n.lo..n.hi] {
                let cand = Candidate {
                    dist2: dist2(self.point(i), x),
                    index: i,
                };
                if heap.len() < k {
                    heap.push(cand);
                } else if cand < *heap.peek().expect("heap is full") {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        let (dl, dr) = (self.box_dist2(n.left, x), self.box_dist2(n.right, x));
        let order = if dl <= dr {
            [(n.left, dl), (n.right, dr)]
        } else {
            [(n.right, dr), (n.left, dl)]
        };
        for (child, d) in order {
            // Equal distances may still hide a smaller index, so only prune on `>`.
            if heap.len() == k && d > heap.peek().map_or(f64::INFINITY, |c| c.dist2) {
                continue;
            }
            self.knn_visit(child, x, k, heap);
        }
    }

    /// `min_i |x - p_i|^2 + offset_i` and the index attaining it.
    pub(crate) fn min_offset_dist2(&self, x: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        if !self.perm.is_empty() {
            self.offset_visit(0, x, &mut best);
        }
        best
    }

    fn offset_visit(&self, node: usize, x: &[f64], best: &mut (f64, usize)) {
        let n = &self.nodes[node];
        if n.left == NO_CHILD {
            for &i in &self.perm[n.lo..n.hi] {
                let v = dist2(self.point(i), x) + self.offsets[i];
                if v < best.0 || (v == best.0 && i < best.1) {
                    *best = (v, i);
                }
            }
            return;
        }
        let l = self.box_dist2(n.left, x) + self.nodes[n.left].min_offset;
        let r = self.box_dist2(n.right, x) + self.nodes[n.right].min_offset;
        let order = if l <= r {
            [(n.left, l), (n.right, r)]
        } else {
            [(n.right, r), (n.left, l)]
        };
        for (child, bound) in order {
            if bound <= best.0 {
                self.offset_visit(child, x, best);
            }
        }
    }

    /// Number of points with `|x - p|^2 <= r2`.
    pub(crate) fn count_within(&self, x: &[f64], r2: f64) -> usize {
        if self.perm.is_empty() {
            return 0;
        }
        let mut count = 0;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.box_dist2(node, x) > r2 {
                continue;
            }
            let n = &self.nodes[node];
            if n.left == NO_CHILD {
                count += self.perm[n.lo..n.hi]
                    .iter()
                    .filter(|&&i| dist2(self.point(i), x) <= r2)
                    .count();
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
        count
    }
}

/// Exact k-nearest-neighbor index over a [`PointCloud`].
///
/// Results are ordered by non-decreasing distance; equal distances are ordered
/// by point index, so answers are reproducible and match an exhaustive scan.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    cloud: PointCloud,
    tree: KdTree,
}

impl NeighborIndex {
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyInput);
        }
        let tree = KdTree::new(
            cloud.dim(),
            cloud.as_flat().to_vec(),
            vec![0.0; cloud.len()],
        );
        Ok(Self {
            cloud: cloud.clone(),
            tree,
        })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    /// Indices of the `k` nearest points to `x`.
    pub fn knn(&self, x: &[f64], k: usize) -> Result<Vec<usize>> {
        Ok(self
            .knn_with_dist2(x, k)?
            .into_iter()
            .map(|(_, i)| i)
            .collect())
    }

    /// Like [`NeighborIndex::knn`] but also returns squared distances.
    pub fn knn_with_dist2(&self, x: &[f64], k: usize) -> Result<Vec<(f64, usize)>> {
        self.cloud.check_query(x)?;
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k > self.len() {
            return Err(Error::KExceedsSize { k, n: self.len() });
        }
        Ok(self.tree.knn(x, k))
    }

    /// Up to `k` nearest points; `k` larger than the cloud is clamped.
    pub fn knn_clamped(&self, x: &[f64], k: usize) -> Result<Vec<usize>> {
        self.knn(x, k.clamp(1, self.len()))
    }

    /// Number of points in the closed ball `B(x, r)`.
    pub fn count_within(&self, x: &[f64], r: f64) -> Result<usize> {
        self.cloud.check_query(x)?;
        Ok(self.tree.count_within(x, r * r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::knn_exhaustive;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    #[test]
    fn nearest_of_two() {
        let idx = NeighborIndex::build(&cloud(&[[0.0, 0.0], [3.0, 0.0]])).unwrap();
        assert_eq!(idx.knn(&[1.0, 0.0], 1).unwrap(), vec![0]);
    }

    #[test]
    fn clamped_query_on_singleton() {
        let idx = NeighborIndex::build(&cloud(&[[2.0, 5.0]])).unwrap();
        assert_eq!(idx.knn_clamped(&[-4.0, 1.0], 5).unwrap(), vec![0]);
        assert!(matches!(
            idx.knn(&[0.0, 0.0], 5),
            Err(Error::KExceedsSize { k: 5, n: 1 })
        ));
    }

    #[test]
    fn two_nearest_and_tie_break() {
        let idx = NeighborIndex::build(&cloud(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])).unwrap();
        assert_eq!(idx.knn(&[0.0, 0.0], 2).unwrap(), vec![0, 1]);
        let tie = NeighborIndex::build(&cloud(&[[-1.0, 0.0], [1.0, 0.0]])).unwrap();
        assert_eq!(tie.knn(&[0.0, 0.0], 1).unwrap(), vec![0]);
    }

    #[test]
    fn rejects_zero_k_and_bad_dimension() {
        let idx = NeighborIndex::build(&cloud(&[[0.0, 0.0]])).unwrap();
        assert!(matches!(idx.knn(&[0.0, 0.0], 0), Err(Error::ZeroK)));
        assert!(idx.knn(&[0.0], 1).is_err());
    }

    #[test]
    fn random_queries_match_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 3]> = (0..100)
            .map(|_| [rng.random(), rng.random(), rng.random()])
            .collect();
        let c = PointCloud::from_points(&pts).unwrap();
        let idx = NeighborIndex::build(&c).unwrap();
        for _ in 0..50 {
            let q = [rng.random(), rng.random(), rng.random()];
            assert_eq!(idx.knn(&q, 7).unwrap(), knn_exhaustive(&c, &q, 7));
        }
    }

    #[test]
    fn heavy_ties_on_a_lattice() {
        // Integer lattice: many equal distances exercise the index tie-break.
        let pts: Vec<[f64; 2]> = (0..15)
            .flat_map(|i| (0..15).map(move |j| [i as f64, j as f64]))
            .collect();
        let c = PointCloud::from_points(&pts).unwrap();
        let idx = NeighborIndex::build(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let q = [
                rng.random_range(0..30) as f64 * 0.5,
                rng.random_range(0..30) as f64 * 0.5,
            ];
            let k = rng.random_range(1..=20);
            assert_eq!(idx.knn(&q, k).unwrap(), knn_exhaustive(&c, &q, k));
        }
    }

    #[test]
    fn count_within_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 2]> = (0..300).map(|_| [rng.random(), rng.random()]).collect();
        let c = PointCloud::from_points(&pts).unwrap();
        let idx = NeighborIndex::build(&c).unwrap();
        for _ in 0..40 {
            let q = [rng.random(), rng.random()];
            let r: f64 = rng.random_range(0.0..0.5);
            let expected = c.points().filter(|p| dist2(p, &q) <= r * r).count();
            assert_eq!(idx.count_within(&q, r).unwrap(), expected);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn knn_distance_multiset_is_exact(
            pts in prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 1..400),
            q in prop::array::uniform2(-15.0f64..15.0),
            k in 1usize..30,
        ) {
            let c = PointCloud::from_points(&pts).unwrap();
            let idx = NeighborIndex::build(&c).unwrap();
            let k = k.min(c.len());
            let got: Vec<f64> = idx.knn_with_dist2(&q, k).unwrap().iter().map(|x| x.0).collect();
            let want: Vec<f64> = knn_exhaustive(&c, &q, k).iter().map(|&i| dist2(c.point(i), &q)).collect();
            prop_assert_eq!(got, want);
        }
    }
}
