//! Seeded empirical checks of the distance bounds, producing JSON-ready
//! reports with a fixed field set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{stability_bound, witnessed_bound, WITNESSED_FACTOR};
use crate::dtm::{eval_dtm, DiscreteMeasure, KDistance, WitnessedKDistance};
use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, PointCloud};
use crate::sampling::{circle_alpha, circle_discretization, circle_discretization_error};
use crate::topology::{rasterize, BoundingBox};
use crate::transport::w2_exact;

/// Additive slack for floating-point comparisons in every check.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct GeneralReport {
    pub check: &'static str,
    pub seed: u64,
    pub clouds: usize,
    pub queries_per_cloud: usize,
    pub evaluations: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub bound: f64,
    /// Largest amount by which either side of `d <= d^w <= (2+sqrt 2) d` fails.
    pub max_violation: f64,
    pub pass: bool,
}

/// Query points: half drawn near the cloud, half far outside its box.
pub fn random_queries(rng: &mut ChaCha8Rng, cloud: &PointCloud, count: usize) -> Vec<Vec<f64>> {
    let d = cloud.dim();
    let (mut lo, mut hi) = (vec![f64::INFINITY; d], vec![f64::NEG_INFINITY; d]);
    for p in cloud.points() {
        for a in 0..d {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (0..count)
        .map(|q| {
            let far = q % 2 == 1;
            (0..d)
                .map(|a| {
                    let span = (hi[a] - lo[a]).max(1.0);
                    let t: f64 = rng.random_range(-0.25..1.25);
                    let base = lo[a] + t * span;
                    if far {
                        base * 1e3 + rng.random_range(-1.0..1.0) * 1e3 * span
                    } else {
                        base
                    }
                })
                .collect()
        })
        .collect()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointCloud {
    let coords = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointCloud::from_flat(dim, coords).expect("finite coordinates")
}

/// Checks `d_{P,k} <= d^w_{P,k} <= (2 + sqrt 2) d_{P,k}` on the given
/// `(cloud, k)` instances.
pub fn general_bound_on(
    instances: &[(PointCloud, usize)],
    queries_per_cloud: usize,
    seed: u64,
) -> Result<GeneralReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_ratio, mut max_ratio, mut max_violation) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut evaluations = 0;
    for (cloud, k) in instances {
        let index = NeighborIndex::build(cloud)?;
        let wk = WitnessedKDistance::from_index(&index, *k)?;
        let kd = KDistance::from_index(index, *k)?;
        for x in random_queries(&mut rng, cloud, queries_per_cloud) {
            let (d, dw) = (kd.eval(&x), wk.eval(&x));
            let scale = d.max(1.0);
            max_violation = max_violation
                .max((d - dw) / scale)
                .max((dw - WITNESSED_FACTOR * d) / scale);
            if d > 1e-12 {
                min_ratio = min_ratio.min(dw / d);
                max_ratio = max_ratio.max(dw / d);
            }
            evaluations += 1;
        }
    }
    Ok(GeneralReport {
        check: "general",
        seed,
        clouds: instances.len(),
        queries_per_cloud,
        evaluations,
        min_ratio,
        max_ratio,
        bound: WITNESSED_FACTOR,
        max_violation,
        pass: max_violation <= SLACK,
    })
}

/// Random clouds of `2..=max_n` points in dimensions drawn from `dims`.
pub fn general_bound_random(
    clouds: usize,
    queries_per_cloud: usize,
    max_n: usize,
    max_k: usize,
    dims: &[usize],
    seed: u64,
) -> Result<GeneralReport> {
    if dims.is_empty() || max_n < 1 || max_k < 1 {
        return Err(Error::InvalidParameter("empty parameter range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances: Vec<(PointCloud, usize)> = (0..clouds)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let dim = dims[rng.random_range(0..dims.len())];
            let k = rng.random_range(1..=max_k.min(n));
            (random_cloud(&mut rng, n, dim), k)
        })
        .collect();
    general_bound_on(&instances, queries_per_cloud, seed.wrapping_add(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub check: &'static str,
    pub seed: u64,
    pub pairs: usize,
    pub queries_per_pair: usize,
    pub m0_values: Vec<f64>,
    pub max_w2: f64,
    /// Smallest `w2 / sqrt(m0) + slack - |d_mu - d_nu|` observed.
    pub min_margin: f64,
    pub pass: bool,
}

/// Probability measure with at most `max_atoms` atoms and rational masses.
pub fn random_rational_measure(
    rng: &mut ChaCha8Rng,
    max_atoms: usize,
    dim: usize,
) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let support = random_cloud(rng, n, dim);
    let counts: Vec<u64> = (0..n).map(|_| rng.random_range(1..=6)).collect();
    let total = counts.iter().sum();
    DiscreteMeasure::from_counts(support, &counts, total).expect("valid counts")
}

pub fn stability_check(
    pairs: usize,
    queries_per_pair: usize,
    m0_values: &[f64],
    max_atoms: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if let Some(&m0) = m0_values.iter().find(|&&m| !(m > 0.0 && m <= 1.0)) {
        return Err(Error::MassParameter { m0, total: 1.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_margin, mut max_w2) = (f64::INFINITY, 0.0f64);
    for _ in 0..pairs {
        let mu = random_rational_measure(&mut rng, max_atoms, 2);
        let nu = random_rational_measure(&mut rng, max_atoms, 2);
        let w2 = w2_exact(&mu, &nu)?.distance;
        max_w2 = max_w2.max(w2);
        let queries = random_queries(&mut rng, mu.support(), queries_per_pair);
        for &m0 in m0_values {
            let allowed = stability_bound(w2, m0) + SLACK;
            for x in &queries {
                let gap = (eval_dtm(&mu, m0, x)? - eval_dtm(&nu, m0, x)?).abs();
                min_margin = min_margin.min(allowed - gap);
            }
        }
    }
    Ok(StabilityReport {
        check: "stability",
        seed,
        pairs,
        queries_per_pair,
        m0_values: m0_values.to_vec(),
        max_w2,
        min_margin,
        pass: min_margin >= 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessedEntry {
    pub m0: f64,
    pub k: usize,
    pub sup_error: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessedReport {
    pub check: &'static str,
    pub seed: Option<u64>,
    pub n: usize,
    pub sigma: Option<f64>,
    pub radius: f64,
    pub alpha: f64,
    pub ell: u32,
    pub atoms: usize,
    pub w2_to_atoms: f64,
    pub discretization_error: f64,
    /// Upper estimate of `W2(U_P, mu)`: exact distance to the atoms plus the
    /// atoms' own distance bound to the circle.
    pub w2_hat: f64,
    pub grid: usize,
    pub entries: Vec<WitnessedEntry>,
    pub pass: bool,
}

/// Sup over a grid of `|d^w_{P,k} - d_K|` for the circle `K` of radius
/// `radius` centered at the origin, against the witnessed bound with the
/// arc-length uniform measure as reference.
#[allow(clippy::too_many_arguments)]
pub fn witnessed_circle_check(
    cloud: &PointCloud,
    radius: f64,
    m0_values: &[f64],
    atoms: usize,
    grid: usize,
    alpha: Option<f64>,
    seed: Option<u64>,
    sigma: Option<f64>,
) -> Result<WitnessedReport> {
    if cloud.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: cloud.dim(),
        });
    }
    let n = cloud.len();
    let alpha = alpha.unwrap_or_else(|| circle_alpha(radius));
    let ell = 1;
    let w2_to_atoms = w2_exact(
        &DiscreteMeasure::uniform(cloud),
        &circle_discretization(radius, atoms)?,
    )?
    .distance;
    let discretization_error = circle_discretization_error(radius, atoms);
    let w2_hat = w2_to_atoms + discretization_error;
    let half = 1.5 * radius;
    let bbox = BoundingBox::new(-half, half, -half, half)?;
    let index = NeighborIndex::build(cloud)?;
    let entries = m0_values
        .iter()
        .map(|&m0| {
            let k = ((m0 * n as f64).round() as usize).clamp(1, n);
            let m0 = k as f64 / n as f64;
            let wk = WitnessedKDistance::from_index(&index, k)?;
            let err = rasterize(
                |x| (wk.eval(x) - ((x[0] * x[0] + x[1] * x[1]).sqrt() - radius).abs()).abs(),
                bbox,
                grid,
                grid,
            )?;
            let sup_error = err.max_value();
            let bound = witnessed_bound(w2_hat, m0, alpha, ell);
            Ok(WitnessedEntry {
                m0,
                k,
                sup_error,
                bound,
                pass: sup_error <= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = entries.iter().all(|e| e.pass);
    Ok(WitnessedReport {
        check: "witnessed",
        seed,
        n,
        sigma,
        radius,
        alpha,
        ell,
        atoms,
        w2_to_atoms,
        discretization_error,
        w2_hat,
        grid,
        entries,
        pass,
    })
}
