//! Exact Wasserstein-2 distances between finitely supported measures.
//!
//! Two independent exact solvers: a network simplex on the transportation
//! problem (masses scaled to integers by a common denominator) and a
//! shortest-augmenting-path assignment solver for equal-size uniform clouds.

mod assignment;
mod simplex;

use crate::dtm::{lcm, DiscreteMeasure, MASS_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{dist2, PointCloud};

/// Largest support size accepted by [`w2_exact`] on either side.
pub const MAX_SUPPORT: usize = 4096;

/// Largest common mass denominator the exact path accepts.
const MAX_DENOMINATOR: u64 = 1 << 52;

/// One arc of a transport plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// A coupling between two discrete measures, listed by positive-mass arcs.
#[derive(Clone, Debug, Default)]
pub struct TransportPlan {
    pub entries: Vec<PlanEntry>,
}

impl TransportPlan {
    /// Row and column sums of the plan.
    pub fn marginals(&self, n_source: usize, n_target: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rows = vec![0.0; n_source];
        let mut cols = vec![0.0; n_target];
        for e in &self.entries {
            rows[e.source] += e.mass;
            cols[e.target] += e.mass;
        }
        (rows, cols)
    }

    /// `sum mass * |x_src - y_tgt|^2`.
    pub fn squared_cost(&self, source: &PointCloud, target: &PointCloud) -> f64 {
        self.entries
            .iter()
            .map(|e| e.mass * dist2(source.point(e.source), target.point(e.target)))
            .sum()
    }

    /// Checks positivity and both marginals against the given measures.
    pub fn is_feasible(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure, tol: f64) -> bool {
        if self.entries.iter().any(|e| e.mass.is_nan() || e.mass <= 0.0) {
            return false;
        }
        let (rows, cols) = self.marginals(mu.len(), nu.len());
        rows.iter()
            .zip(mu.masses())
            .all(|(a, b)| (a - b).abs() <= tol)
            && cols
                .iter()
                .zip(nu.masses())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[derive(Clone, Debug)]
pub struct W2Result {
    pub distance: f64,
    pub plan: TransportPlan,
}

/// Exact Wasserstein-2 distance by min-cost flow.
pub fn w2_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<W2Result> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
        });
    }
    let (left, right) = (mu.total_mass(), nu.total_mass());
    if (left - right).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch { left, right });
    }
    for size in [mu.len(), nu.len()] {
        if size > MAX_SUPPORT {
            return Err(Error::SizeGuard {
                size,
                limit: MAX_SUPPORT,
            });
        }
    }
    let q = lcm(mu.resolve_denominator()?, nu.resolve_denominator()?)
        .filter(|&q| q <= MAX_DENOMINATOR)
        .ok_or_else(|| Error::InvalidParameter("common mass denominator too large".into()))?;
    let supply = mu.integer_masses(q)?;
    let demand = nu.integer_masses(q)?;
    if supply.iter().sum::<u64>() != demand.iter().sum::<u64>() {
        return Err(Error::MassMismatch { left, right });
    }

    let (a, b) = (mu.support(), nu.support());
    let m = b.len();
    let mut costs = Vec::with_capacity(a.len() * m);
    for p in a.points() {
        costs.extend(b.points().map(|y| dist2(p, y)));
    }
    let sol = simplex::Transportation::new(&supply, &demand, &costs).solve()?;
    let qf = q as f64;
    let mut squared = 0.0;
    let entries = sol
        .flows
        .iter()
        .map(|&(i, j, f)| {
            let mass = f as f64 / qf;
            squared += mass * costs[i * m + j];
            PlanEntry {
                source: i,
                target: j,
                mass,
            }
        })
        .collect();
    Ok(W2Result {
        distance: squared.max(0.0).sqrt(),
        plan: TransportPlan { entries },
    })
}

/// Exact W2 between the uniform measures on two clouds of equal size, by
/// optimal assignment.
pub fn w2_assignment(a: &PointCloud, b: &PointCloud) -> Result<W2Result> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.len();
    let mut costs = Vec::with_capacity(n * n);
    for p in a.points() {
        costs.extend(b.points().map(|y| dist2(p, y)));
    }
    let assignment = assignment::solve_assignment(&costs, n);
    let mass = 1.0 / n as f64;
    let entries: Vec<PlanEntry> = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| PlanEntry {
            source: i,
            target: j,
            mass,
        })
        .collect();
    let squared: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i * n + j])
        .sum::<f64>()
        / n as f64;
    Ok(W2Result {
        distance: squared.max(0.0).sqrt(),
        plan: TransportPlan { entries },
    })
}

/// `W2(U_P, reference)` where `U_P` is the uniform measure on `cloud`.
pub fn w2_empirical_to_reference(cloud: &PointCloud, reference: &DiscreteMeasure) -> Result<f64> {
    Ok(w2_exact(&DiscreteMeasure::uniform(cloud), reference)?.distance)
}
