//! Distance to a measure: the exact k-distance, the general definition for
//! finitely supported measures, and the witnessed approximation.
//!
//! For a cloud `P` of size `N` and `m0 = k / N`, the squared k-distance at `x`
//! is the mean squared distance from `x` to its `k` nearest neighbors. The same
//! function is the power distance to the barycenters of all `k`-subsets of
//! `P`; the witnessed k-distance keeps only the `N` barycenters formed by each
//! point and its `k - 1` nearest neighbors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::power::{barycenter_unchecked, clamp_sqrt};
use crate::geometry::{dist2, NeighborIndex, PointCloud, PowerDistance, WeightedSite};

/// Largest number of subsets [`brute_force_sites`] will enumerate.
pub const ORACLE_SUBSET_LIMIT: u128 = 1_000_000;

/// Tolerance used when comparing total masses.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Exact k-distance to the uniform measure on a cloud.
#[derive(Clone, Debug)]
pub struct KDistance {
    index: NeighborIndex,
    k: usize,
}

impl KDistance {
    pub fn new(cloud: &PointCloud, k: usize) -> Result<Self> {
        check_k(k, cloud.len())?;
        Ok(Self {
            index: NeighborIndex::build(cloud)?,
            k,
        })
    }

    pub fn from_index(index: NeighborIndex, k: usize) -> Result<Self> {
        check_k(k, index.len())?;
        Ok(Self { index, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m0(&self) -> f64 {
        self.k as f64 / self.index.len() as f64
    }

    pub fn index(&self) -> &NeighborIndex {
        &self.index
    }

    /// Root mean squared distance to the `k` nearest neighbors.
    ///
    /// Panics if `x` has the wrong dimension.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let nn = self
            .index
            .knn_with_dist2(x, self.k)
            .expect("query dimension must match the cloud");
        let sum: f64 = nn.iter().map(|(d2, _)| d2).sum();
        (sum / self.k as f64).sqrt()
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > n {
        return Err(Error::KExceedsSize { k, n });
    }
    Ok(())
}

/// Witnessed k-distance: the power distance to the barycenters of every input
/// point together with its `k - 1` nearest neighbors.
#[derive(Clone, Debug)]
pub struct WitnessedKDistance {
    sites: PowerDistance,
    k: usize,
    n: usize,
    // Row `i` holds the `k` point indices whose barycenter is site `i`.
    members: Vec<usize>,
}

impl WitnessedKDistance {
    pub fn new(cloud: &PointCloud, k: usize) -> Result<Self> {
        check_k(k, cloud.len())?;
        let index = NeighborIndex::build(cloud)?;
        Self::from_index(&index, k)
    }

    pub fn from_index(index: &NeighborIndex, k: usize) -> Result<Self> {
        let cloud = index.cloud();
        let n = cloud.len();
        check_k(k, n)?;
        let rows: Vec<(Vec<usize>, WeightedSite)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let members = witness_set(index, i, k);
                let site = barycenter_unchecked(cloud, &members);
                (members, site)
            })
            .collect();
        let mut members = Vec::with_capacity(n * k);
        let mut sites = Vec::with_capacity(n);
        for (m, s) in rows {
            members.extend(m);
            sites.push(s);
        }
        Ok(Self {
            sites: PowerDistance::new(sites)?,
            k,
            n,
            members,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m0(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn power_distance(&self) -> &PowerDistance {
        &self.sites
    }

    pub fn sites(&self) -> &[WeightedSite] {
        self.sites.sites()
    }

    /// Point indices of the barycenter witnessed by point `i`; `i` comes first.
    pub fn witness_members(&self, i: usize) -> &[usize] {
        &self.members[i * self.k..(i + 1) * self.k]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.sites.eval(x)
    }
}

/// Point `i` followed by its `k - 1` nearest other points.
fn witness_set(index: &NeighborIndex, i: usize, k: usize) -> Vec<usize> {
    let x = index.cloud().point(i);
    let nn = index
        .knn(x, k)
        .expect("k was checked against the cloud size");
    let mut members = Vec::with_capacity(k);
    members.push(i);
    // Coincident points with a smaller index may outrank `i` itself; dropping
    // `i` from the list and keeping the first `k - 1` others handles both cases.
    members.extend(nn.into_iter().filter(|&j| j != i).take(k - 1));
    members
}

/// The power distance to the barycenters of every `k`-subset of the cloud.
///
/// Exponential; guarded by [`ORACLE_SUBSET_LIMIT`].
pub fn brute_force_sites(cloud: &PointCloud, k: usize) -> Result<PowerDistance> {
    let n = cloud.len();
    check_k(k, n)?;
    let subsets = binomial(n as u128, k as u128);
    if subsets > ORACLE_SUBSET_LIMIT {
        return Err(Error::OracleTooLarge {
            subsets,
            limit: ORACLE_SUBSET_LIMIT,
        });
    }
    let mut sites = Vec::with_capacity(subsets as usize);
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        sites.push(barycenter_unchecked(cloud, &comb));
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        while i > 0 && comb[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        comb[i - 1] += 1;
        for j in i..k {
            comb[j] = comb[j - 1] + 1;
        }
    }
    PowerDistance::new(sites)
}

/// `C(n, k)`, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// A finitely supported measure with positive masses.
///
/// A measure may declare a mass denominator `q`, meaning every mass is an
/// integer multiple of `1 / q`; the exact transport solver needs it.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    support: PointCloud,
    masses: Vec<f64>,
    denominator: Option<u64>,
}

impl DiscreteMeasure {
    pub fn new(support: PointCloud, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != support.len() {
            return Err(Error::SizeMismatch {
                left: support.len(),
                right: masses.len(),
            });
        }
        for (index, &mass) in masses.iter().enumerate() {
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::InvalidMass { index, mass });
            }
        }
        Ok(Self {
            support,
            masses,
            denominator: None,
        })
    }

    /// Uniform probability measure on the cloud (denominator `N`).
    pub fn uniform(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        Self {
            support: cloud.clone(),
            masses: vec![1.0 / n as f64; n],
            denominator: Some(n as u64),
        }
    }

    /// Masses `counts[i] / denominator`.
    pub fn from_counts(support: PointCloud, counts: &[u64], denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidParameter(
                "denominator must be positive".into(),
            ));
        }
        let masses = counts
            .iter()
            .map(|&c| c as f64 / denominator as f64)
            .collect();
        let mut m = Self::new(support, masses)?;
        m.denominator = Some(denominator);
        Ok(m)
    }

    pub fn dirac(point: &[f64]) -> Result<Self> {
        Self::from_counts(PointCloud::from_points(&[point])?, &[1], 1)
    }

    /// Declares (and verifies) a common mass denominator.
    pub fn with_denominator(mut self, denominator: u64) -> Result<Self> {
        self.integer_masses(denominator)?;
        self.denominator = Some(denominator);
        Ok(self)
    }

    pub fn support(&self) -> &PointCloud {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn denominator(&self) -> Option<u64> {
        self.denominator
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Masses scaled by `denominator`, rejecting any that are not integral.
    pub fn integer_masses(&self, denominator: u64) -> Result<Vec<u64>> {
        self.masses
            .iter()
            .enumerate()
            .map(|(index, &mass)| {
                let scaled = mass * denominator as f64;
                let rounded = scaled.round();
                if rounded < 1.0 || (scaled - rounded).abs() > 1e-6 {
                    Err(Error::NonRationalMass {
                        index,
                        mass,
                        denominator,
                    })
                } else {
                    Ok(rounded as u64)
                }
            })
            .collect()
    }

    /// The declared denominator, or the least common denominator of the
    /// masses when each is a fraction with denominator at most `10^6`.
    pub fn resolve_denominator(&self) -> Result<u64> {
        if let Some(q) = self.denominator {
            return Ok(q);
        }
        let mut lcm_acc: u64 = 1;
        for &m in &self.masses {
            let q = rational_denominator(m, 1_000_000).ok_or(Error::MissingDenominator)?;
            lcm_acc = lcm(lcm_acc, q).ok_or(Error::MissingDenominator)?;
        }
        self.integer_masses(lcm_acc)?;
        Ok(lcm_acc)
    }
}

/// Denominator of the best rational approximation of `x` with denominator at
/// most `max_den`, if it matches `x` to round-off.
fn rational_denominator(x: f64, max_den: u64) -> Option<u64> {
    // Continued-fraction convergents.
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Some(k1 as u64);
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Distance to a finitely supported measure with mass parameter `m0`.
///
/// Atoms are taken in order of distance to `x`; the last one contributes only
/// the fraction of its mass needed to reach `m0`.
pub fn eval_dtm(mu: &DiscreteMeasure, m0: f64, x: &[f64]) -> Result<f64> {
    let total = mu.total_mass();
    if !(m0 > 0.0 && m0 <= total + MASS_TOLERANCE) {
        return Err(Error::MassParameter { m0, total });
    }
    mu.support.check_query(x)?;
    let mut atoms: Vec<(f64, f64)> = mu
        .support
        .points()
        .zip(&mu.masses)
        .map(|(p, &m)| (dist2(p, x), m))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut remaining = m0;
    let mut acc = 0.0;
    for (d2, m) in atoms {
        if remaining <= 0.0 {
            break;
        }
        let take = m.min(remaining);
        acc += take * d2;
        remaining -= take;
    }
    Ok(clamp_sqrt(acc / m0))
}
