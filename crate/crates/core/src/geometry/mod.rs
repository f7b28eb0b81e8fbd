//! Point clouds, exact nearest-neighbor queries and power distances.

mod kdtree;
pub(crate) mod power;

pub use kdtree::NeighborIndex;
pub use power::{barycenter_site, PowerDistance, WeightedSite};

pub(crate) use kdtree::KdTree;

use crate::error::{Error, Result};

/// An ordered, non-empty list of points in `R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(pos / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a constructed cloud; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Largest pairwise distance (exhaustive, `O(N^2)`).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            let p = self.point(i);
            for j in i + 1..n {
                best = best.max(dist2(p, self.point(j)));
            }
        }
        best.sqrt()
    }

    pub(crate) fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Squared Euclidean distance.
#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Exhaustive k-nearest-neighbor scan with the library's tie-break rule
/// (smaller squared distance first, then smaller index).
pub fn knn_exhaustive(cloud: &PointCloud, x: &[f64], k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = cloud
        .points()
        .enumerate()
        .map(|(i, p)| (dist2(p, x), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k.min(cloud.len()));
    all.into_iter().map(|(_, i)| i).collect()
}
