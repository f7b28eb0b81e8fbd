use std::collections::HashSet;

use super::{dist2, KdTree, PointCloud};
use crate::error::{Error, Result};

/// Squared values down to this are treated as round-off and clamped to zero.
const ROUNDOFF_CLAMP: f64 = -1e-12;

/// A weighted point of a power distance: `x -> |x - center|^2 - weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSite {
    center: Vec<f64>,
    weight: f64,
}

impl WeightedSite {
    pub fn new(center: Vec<f64>, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight > 0.0 {
            return Err(Error::PositiveWeight(weight));
        }
        if center.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { center, weight })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Always `<= 0`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `|x - center|^2 - weight`.
    #[inline]
    pub fn power(&self, x: &[f64]) -> f64 {
        dist2(&self.center, x) - self.weight
    }
}

/// The barycenter of the selected points, weighted by minus their mean
/// squared spread around it.
pub fn barycenter_site(cloud: &PointCloud, indices: &[usize]) -> Result<WeightedSite> {
    if indices.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = HashSet::with_capacity(indices.len());
    for &i in indices {
        if i >= cloud.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: cloud.len(),
            });
        }
        if !seen.insert(i) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(barycenter_unchecked(cloud, indices))
}

pub(crate) fn barycenter_unchecked(cloud: &PointCloud, indices: &[usize]) -> WeightedSite {
    let k = indices.len() as f64;
    let mut center = vec![0.0; cloud.dim()];
    for &i in indices {
        for (c, x) in center.iter_mut().zip(cloud.point(i)) {
            *c += x;
        }
    }
    center.iter_mut().for_each(|c| *c /= k);
    let spread: f64 = indices
        .iter()
        .map(|&i| dist2(&center, cloud.point(i)))
        .sum();
    WeightedSite {
        center,
        weight: -spread / k,
    }
}

/// Lower envelope of the power functions of a non-empty set of sites.
///
/// Evaluation goes through a kd-tree over the centers that carries, per node,
/// the smallest `-weight`; queries return the same value as a linear scan.
#[derive(Clone, Debug)]
pub struct PowerDistance {
    dim: usize,
    sites: Vec<WeightedSite>,
    tree: KdTree,
}

impl PowerDistance {
    pub fn new(sites: Vec<WeightedSite>) -> Result<Self> {
        let dim = sites.first().ok_or(Error::EmptyInput)?.center.len();
        let mut coords = Vec::with_capacity(dim * sites.len());
        let mut offsets = Vec::with_capacity(sites.len());
        for s in &sites {
            if s.center.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.center.len(),
                });
            }
            coords.extend_from_slice(&s.center);
            offsets.push(-s.weight);
        }
        let tree = KdTree::new(dim, coords, offsets);
        Ok(Self { dim, sites, tree })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[WeightedSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `min_s |x - c_s|^2 - w_s`, unclamped.
    pub fn eval_squared(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.tree.min_offset_dist2(x).0
    }

    /// Index of a site attaining the minimum.
    pub fn argmin(&self, x: &[f64]) -> usize {
        self.tree.min_offset_dist2(x).1
    }

    /// Square root of the power distance, with round-off clamped at zero.
    pub fn eval(&self, x: &[f64]) -> f64 {
        clamp_sqrt(self.eval_squared(x))
    }

    /// Reference evaluation by linear scan over the sites.
    pub fn eval_linear(&self, x: &[f64]) -> f64 {
        clamp_sqrt(
            self.sites
                .iter()
                .map(|s| s.power(x))
                .fold(f64::INFINITY, f64::min),
        )
    }
}

#[inline]
pub(crate) fn clamp_sqrt(v: f64) -> f64 {
    if (ROUNDOFF_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v.sqrt()
    }
}
