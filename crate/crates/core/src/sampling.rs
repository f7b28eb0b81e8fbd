//! Seeded samplers for the experimental measures (noisy circles and the
//! sideways figure-8) and estimators for the dimension constant, covering
//! numbers and ball concentration.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dtm::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::geometry::{dist2, NeighborIndex, PointCloud};

/// How `sigma` maps to the per-axis standard deviation of the Gaussian noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseConvention {
    /// Each axis gets standard deviation `sigma`.
    Axis,
    /// Total variance `sigma^2`, i.e. per-axis standard deviation `sigma / sqrt(d)`.
    #[default]
    Total,
}

impl FromStr for NoiseConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis" => Ok(Self::Axis),
            "total" => Ok(Self::Total),
            other => Err(Error::InvalidParameter(format!(
                "unknown noise convention `{other}` (expected axis|total)"
            ))),
        }
    }
}

impl fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Axis => "axis",
            Self::Total => "total",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
    pub convention: NoiseConvention,
}

impl NoiseSpec {
    /// Noise with total variance `sigma^2`.
    pub fn new(sigma: f64, seed: u64) -> Self {
        Self {
            sigma,
            seed,
            convention: NoiseConvention::Total,
        }
    }

    fn axis_std(&self, dim: usize) -> f64 {
        match self.convention {
            NoiseConvention::Axis => self.sigma,
            NoiseConvention::Total => self.sigma / (dim as f64).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Two circles tangent at the origin, centered at `(-r1, 0)` and `(r2, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure8Spec {
    pub r1: f64,
    pub r2: f64,
}

impl Default for Figure8Spec {
    fn default() -> Self {
        Self {
            r1: 2f64.sqrt(),
            r2: (9.0f64 / 8.0).sqrt(),
        }
    }
}

impl Figure8Spec {
    pub fn centers(&self) -> [[f64; 2]; 2] {
        [[-self.r1, 0.0], [self.r2, 0.0]]
    }

    /// Probability of drawing from the left circle (arc-length uniform).
    pub fn left_weight(&self) -> f64 {
        self.r1 / (self.r1 + self.r2)
    }

    /// Euclidean distance to the union of the two circles.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let [c1, c2] = self.centers();
        let d1 = (dist2(x, &c1).sqrt() - self.r1).abs();
        let d2 = (dist2(x, &c2).sqrt() - self.r2).abs();
        d1.min(d2)
    }

    fn validate(&self) -> Result<()> {
        if !(self.r1 > 0.0 && self.r2 > 0.0 && self.r1.is_finite() && self.r2.is_finite()) {
            return Err(Error::InvalidParameter(
                "circle radii must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter(
            "sample size must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

fn gaussian_pair(rng: &mut ChaCha8Rng, std: f64) -> [f64; 2] {
    let gx: f64 = rng.sample(StandardNormal);
    let gy: f64 = rng.sample(StandardNormal);
    [std * gx, std * gy]
}

/// Noisy samples of the figure-8 together with the noiseless curve points
/// they were displaced from.
pub fn sample_figure8_with_clean(
    spec: &Figure8Spec,
    n: usize,
    noise: &NoiseSpec,
) -> Result<(PointCloud, PointCloud)> {
    spec.validate()?;
    noise.validate()?;
    check_count(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let std = noise.axis_std(2);
    let [c1, c2] = spec.centers();
    let left = spec.left_weight();
    let mut clean = Vec::with_capacity(2 * n);
    let mut noisy = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let (c, r) = if rng.random::<f64>() < left {
            (c1, spec.r1)
        } else {
            (c2, spec.r2)
        };
        let t = rng.random_range(0.0..2.0 * PI);
        let p = [c[0] + r * t.cos(), c[1] + r * t.sin()];
        let g = gaussian_pair(&mut rng, std);
        clean.extend_from_slice(&p);
        noisy.extend_from_slice(&[p[0] + g[0], p[1] + g[1]]);
    }
    Ok((
        PointCloud::from_flat(2, noisy)?,
        PointCloud::from_flat(2, clean)?,
    ))
}

pub fn sample_figure8(spec: &Figure8Spec, n: usize, noise: &NoiseSpec) -> Result<PointCloud> {
    Ok(sample_figure8_with_clean(spec, n, noise)?.0)
}

/// Noisy samples of the circle of radius `radius` centered at the origin,
/// together with their noiseless positions.
pub fn sample_circle_with_clean(
    radius: f64,
    n: usize,
    noise: &NoiseSpec,
) -> Result<(PointCloud, PointCloud)> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    noise.validate()?;
    check_count(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let std = noise.axis_std(2);
    let mut clean = Vec::with_capacity(2 * n);
    let mut noisy = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let t = rng.random_range(0.0..2.0 * PI);
        let p = [radius * t.cos(), radius * t.sin()];
        let g = gaussian_pair(&mut rng, std);
        clean.extend_from_slice(&p);
        noisy.extend_from_slice(&[p[0] + g[0], p[1] + g[1]]);
    }
    Ok((
        PointCloud::from_flat(2, noisy)?,
        PointCloud::from_flat(2, clean)?,
    ))
}

pub fn sample_circle(radius: f64, n: usize, noise: &NoiseSpec) -> Result<PointCloud> {
    Ok(sample_circle_with_clean(radius, n, noise)?.0)
}

/// `n` equally spaced points on the circle of radius `radius`.
pub fn circle_points(radius: f64, n: usize) -> Result<PointCloud> {
    check_count(n)?;
    let coords = (0..n)
        .flat_map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect();
    PointCloud::from_flat(2, coords)
}

/// Uniform measure on `n` equally spaced atoms of the circle.
pub fn circle_discretization(radius: f64, n: usize) -> Result<DiscreteMeasure> {
    Ok(DiscreteMeasure::uniform(&circle_points(radius, n)?))
}

/// Upper bound on `W2(arc-length uniform on the circle, circle_discretization)`:
/// the cost of sending each arc of angle `2 pi / n` to the atom at its middle.
pub fn circle_discretization_error(radius: f64, n: usize) -> f64 {
    let h = PI / n as f64;
    // Mean of |2R sin(t/2)|^2 over t in [-h, h] is 2R^2 (1 - sin(h)/h).
    let ratio = if h < 1e-4 {
        1.0 - h * h / 6.0 + h.powi(4) / 120.0
    } else {
        h.sin() / h
    };
    radius * (2.0 * (1.0 - ratio)).max(0.0).sqrt()
}

/// Uniform measure on `n` atoms split between the two circles in proportion
/// to their circumference, equally spaced on each.
pub fn figure8_discretization(spec: &Figure8Spec, n: usize) -> Result<DiscreteMeasure> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "need at least one atom per circle".into(),
        ));
    }
    let n1 = ((n as f64 * spec.left_weight()).round() as usize).clamp(1, n - 1);
    let [c1, c2] = spec.centers();
    let mut coords = Vec::with_capacity(2 * n);
    for (c, r, count) in [(c1, spec.r1, n1), (c2, spec.r2, n - n1)] {
        for i in 0..count {
            let t = 2.0 * PI * (i as f64 + 0.5) / count as f64;
            coords.extend_from_slice(&[c[0] + r * t.cos(), c[1] + r * t.sin()]);
        }
    }
    Ok(DiscreteMeasure::uniform(&PointCloud::from_flat(2, coords)?))
}

/// Sampler description in the `kind:key=value,...` form used on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SamplerSpec {
    Figure8 {
        #[serde(flatten)]
        shape: Figure8Spec,
        n: usize,
        #[serde(flatten)]
        noise: NoiseSpec,
    },
    Circle {
        radius: f64,
        n: usize,
        #[serde(flatten)]
        noise: NoiseSpec,
    },
}

impl SamplerSpec {
    pub fn sample(&self) -> Result<PointCloud> {
        match self {
            Self::Figure8 { shape, n, noise } => sample_figure8(shape, *n, noise),
            Self::Circle { radius, n, noise } => sample_circle(*radius, *n, noise),
        }
    }

    pub fn noise_mut(&mut self) -> &mut NoiseSpec {
        match self {
            Self::Figure8 { noise, .. } | Self::Circle { noise, .. } => noise,
        }
    }

    pub fn n_mut(&mut self) -> &mut usize {
        match self {
            Self::Figure8 { n, .. } | Self::Circle { n, .. } => n,
        }
    }
}

impl FromStr for SamplerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut noise = NoiseSpec::new(0.0, 0);
        let mut n = 1000usize;
        let mut shape = Figure8Spec::default();
        let mut radius = 1.0;
        let bad = |k: &str, v: &str| Error::InvalidParameter(format!("bad value `{v}` for `{k}`"));
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got `{kv}`"))
            })?;
            let (k, v) = (k.trim(), v.trim());
            let num = || v.parse::<f64>().map_err(|_| bad(k, v));
            match (kind, k) {
                (_, "sigma") => noise.sigma = num()?,
                (_, "seed") => noise.seed = v.parse().map_err(|_| bad(k, v))?,
                (_, "N" | "n") => n = v.parse().map_err(|_| bad(k, v))?,
                (_, "noise") => noise.convention = v.parse()?,
                ("figure8", "R1" | "r1") => shape.r1 = num()?,
                ("figure8", "R2" | "r2") => shape.r2 = num()?,
                ("circle", "R" | "r" | "radius") => radius = num()?,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown key `{k}` for sampler `{kind}`"
                    )))
                }
            }
        }
        match kind {
            "figure8" => Ok(Self::Figure8 { shape, n, noise }),
            "circle" => Ok(Self::Circle { radius, n, noise }),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampler `{other}` (expected figure8|circle)"
            ))),
        }
    }
}

impl fmt::Display for SamplerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Figure8 { shape, n, noise } => write!(
                f,
                "figure8:R1={},R2={},sigma={},N={},seed={},noise={}",
                shape.r1, shape.r2, noise.sigma, n, noise.seed, noise.convention
            ),
            Self::Circle { radius, n, noise } => write!(
                f,
                "circle:R={},sigma={},N={},seed={},noise={}",
                radius, noise.sigma, n, noise.seed, noise.convention
            ),
        }
    }
}

/// Number of log-spaced radii probed by [`estimate_alpha`].
pub const ALPHA_RADIUS_STEPS: usize = 32;
/// Probe cap for [`estimate_alpha`]; larger samples are strided.
pub const ALPHA_MAX_PROBES: usize = 512;
/// Neighbor rank defining the local sample resolution.
const RESOLUTION_RANK: usize = 10;

/// Empirical dimension constant of a dense sample of the support.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub ell: u32,
    pub alpha: f64,
    pub diameter: f64,
    /// Smallest probed radius (twice the sample resolution).
    pub r_min: f64,
    pub radii: Vec<f64>,
    pub probes: Vec<usize>,
    /// `masses[p * radii.len() + r]`: empirical mass of `B(probe p, radii[r])`.
    pub masses: Vec<f64>,
}

/// Minimum over probe points and a log-spaced radius grid `[r_min, D]` of
/// `mass(B(p, r)) / r^ell`, with uniform empirical masses on the sample.
///
/// The sample resolution is the largest distance from a point to its
/// tenth nearest neighbor; below twice that, ball masses are counting noise.
pub fn estimate_alpha(sample: &PointCloud, ell: u32) -> Result<DimensionEstimate> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be positive".into()));
    }
    let n = sample.len();
    let diameter = sample.diameter();
    if n < 2 || diameter <= 0.0 {
        return Err(Error::DegenerateSupport);
    }
    let index = NeighborIndex::build(sample)?;
    let rank = RESOLUTION_RANK.min(n - 1);
    let resolution = sample
        .points()
        .map(|p| {
            index
                .knn_with_dist2(p, rank + 1)
                .map(|nn| nn.last().map_or(0.0, |x| x.0.sqrt()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let r_min = (2.0 * resolution).min(diameter);
    let radii: Vec<f64> = if r_min >= diameter {
        vec![diameter]
    } else {
        let ratio = (diameter / r_min).ln();
        (0..ALPHA_RADIUS_STEPS)
            .map(|i| r_min * (ratio * i as f64 / (ALPHA_RADIUS_STEPS - 1) as f64).exp())
            .collect()
    };
    let stride = n.div_ceil(ALPHA_MAX_PROBES);
    let probes: Vec<usize> = (0..n).step_by(stride).collect();
    let mut masses = Vec::with_capacity(probes.len() * radii.len());
    let mut alpha = f64::INFINITY;
    let mut dists = Vec::with_capacity(n);
    for &p in &probes {
        let x = sample.point(p);
        dists.clear();
        dists.extend(sample.points().map(|y| dist2(x, y).sqrt()));
        dists.sort_by(f64::total_cmp);
        for &r in &radii {
            let mass = dists.partition_point(|&d| d <= r) as f64 / n as f64;
            masses.push(mass);
            alpha = alpha.min(mass / r.powi(ell as i32));
        }
    }
    Ok(DimensionEstimate {
        ell,
        alpha,
        diameter,
        r_min,
        radii,
        probes,
        masses,
    })
}

/// Closed-form dimension constant of the arc-length uniform measure on a
/// circle of radius `radius` with `ell = 1`: `inf_r (2/pi) asin(r/2R) / r`.
pub fn circle_alpha(radius: f64) -> f64 {
    1.0 / (PI * radius)
}

/// Mass of `B(p, r)` for `p` on the circle, under the arc-length uniform measure.
pub fn circle_ball_mass(radius: f64, r: f64) -> f64 {
    if r >= 2.0 * radius {
        1.0
    } else {
        (2.0 / PI) * (r / (2.0 * radius)).asin()
    }
}

/// Number of centers chosen by farthest-point greedy until every point lies
/// within `eps` of a center. Starts from point 0.
pub fn covering_number(cloud: &PointCloud, eps: f64) -> Result<usize> {
    Ok(covering_centers(cloud, eps)?.len())
}

/// The centers behind [`covering_number`], in selection order.
pub fn covering_centers(cloud: &PointCloud, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let eps2 = eps * eps;
    let mut nearest: Vec<f64> = cloud.points().map(|p| dist2(p, cloud.point(0))).collect();
    let mut centers = vec![0];
    loop {
        let (far, &d) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("cloud is non-empty");
        if d <= eps2 {
            return Ok(centers);
        }
        centers.push(far);
        let c = cloud.point(far);
        for (slot, p) in nearest.iter_mut().zip(cloud.points()) {
            *slot = slot.min(dist2(p, c));
        }
    }
}

/// Greedy covering count next to the bounds derived from the dimension
/// constant.
#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub eps: f64,
    pub count: usize,
    /// `alpha / eps^ell` as stated for the dimension-complexity relation.
    pub lemma_bound: f64,
    /// `2^ell / (alpha eps^ell)`: greedy centers are `eps`-separated, so the
    /// disjoint balls of radius `eps/2` around them each carry mass at least
    /// `alpha (eps/2)^ell`.
    pub packing_bound: f64,
}

pub fn covering_report(
    cloud: &PointCloud,
    eps: f64,
    alpha: f64,
    ell: u32,
) -> Result<CoveringReport> {
    let count = covering_number(cloud, eps)?;
    let e = eps.powi(ell as i32);
    Ok(CoveringReport {
        eps,
        count,
        lemma_bound: alpha / e,
        packing_bound: 2f64.powi(ell as i32) / (alpha * e),
    })
}

/// Radius `eta` such that every ball `B(p, eta)` around the support carries
/// mass at least `m0` of any measure within `w2` of the reference.
pub fn concentration_radius(w2: f64, m0: f64, alpha: f64, ell: u32) -> f64 {
    let l = ell as f64;
    w2 / m0.sqrt() + 4.0 * m0.powf(0.5 + 1.0 / l) * alpha.powf(-1.0 / l)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeMass {
    pub probe: usize,
    pub mass: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub m0: f64,
    pub eta: f64,
    pub probes: Vec<ProbeMass>,
    pub flagged: usize,
}

/// Empirical `U_P`-mass of `B(p, eta)` for up to `max_probes` points `p`
/// taken evenly from `support_sample`; probes with mass below `m0` are flagged.
pub fn concentration_check(
    cloud: &PointCloud,
    support_sample: &PointCloud,
    m0: f64,
    eta: f64,
    max_probes: usize,
) -> Result<ConcentrationReport> {
    if cloud.dim() != support_sample.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: support_sample.dim(),
        });
    }
    let index = NeighborIndex::build(cloud)?;
    let n = cloud.len() as f64;
    let stride = support_sample.len().div_ceil(max_probes.max(1));
    let probes = (0..support_sample.len())
        .step_by(stride)
        .map(|i| {
            let mass = index.count_within(support_sample.point(i), eta)? as f64 / n;
            Ok(ProbeMass {
                probe: i,
                mass,
                flagged: mass < m0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = probes.iter().filter(|p| p.flagged).count();
    Ok(ConcentrationReport {
        m0,
        eta,
        probes,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_figure8_points_lie_on_circles() {
        let spec = Figure8Spec::default();
        let p = sample_figure8(&spec, 4, &NoiseSpec::new(0.0, 17)).unwrap();
        let [c1, c2] = spec.centers();
        for x in p.points() {
            let d = (dist2(x, &c1).sqrt() - spec.r1)
                .abs()
                .min((dist2(x, &c2).sqrt() - spec.r2).abs());
            assert!(d <= 1e-12);
            assert!(spec.distance(x) <= 1e-12);
        }
    }

    #[test]
    fn noiseless_circle_and_determinism() {
        let a = sample_circle(1.0, 100, &NoiseSpec::new(0.0, 3)).unwrap();
        assert!(a
            .points()
            .all(|p| (dist2(p, &[0.0, 0.0]).sqrt() - 1.0).abs() <= 1e-12));
        let b = sample_circle(1.0, 100, &NoiseSpec::new(0.0, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_circle(1.0, 100, &NoiseSpec::new(0.0, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn total_convention_shrinks_axis_noise() {
        let mut noise = NoiseSpec::new(0.5, 1);
        assert!((noise.axis_std(2) - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        noise.convention = NoiseConvention::Axis;
        assert_eq!(noise.axis_std(2), 0.5);
    }

    #[test]
    fn spec_strings_round_trip() {
        let s: SamplerSpec = "figure8:R1=1.5,R2=1.0607,sigma=0.45,N=6000,seed=42"
            .parse()
            .unwrap();
        match &s {
            SamplerSpec::Figure8 { shape, n, noise } => {
                assert_eq!((shape.r1, shape.r2, *n), (1.5, 1.0607, 6000));
                assert_eq!((noise.sigma, noise.seed), (0.45, 42));
            }
            _ => panic!("wrong kind"),
        }
        assert_eq!(s.to_string().parse::<SamplerSpec>().unwrap(), s);
        assert!("torus:N=3".parse::<SamplerSpec>().is_err());
        assert!("circle:R=1,wobble=2".parse::<SamplerSpec>().is_err());
        assert!("circle:N=abc".parse::<SamplerSpec>().is_err());
    }

    #[test]
    fn discretization_error_matches_numeric_integral() {
        // Midpoint-rule integral of the squared chord over one arc.
        let n = 64;
        let h = PI / n as f64;
        let steps = 200_000;
        let mean: f64 = (0..steps)
            .map(|i| {
                let t = -h + (i as f64 + 0.5) * 2.0 * h / steps as f64;
                (2.0 * (t / 2.0).sin()).powi(2)
            })
            .sum::<f64>()
            / steps as f64;
        assert!((circle_discretization_error(1.0, n) - mean.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn alpha_rejects_degenerate_inputs() {
        let single = PointCloud::from_points(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            estimate_alpha(&single, 1),
            Err(Error::DegenerateSupport)
        ));
        let c = circle_points(1.0, 10).unwrap();
        assert!(estimate_alpha(&c, 0).is_err());
    }

    #[test]
    fn covering_trivial_cases() {
        let c = circle_points(1.0, 50).unwrap();
        assert_eq!(covering_number(&c, 2.0).unwrap(), 1);
        assert!(covering_number(&c, 0.0).is_err());
        let cover = covering_centers(&c, 0.3).unwrap();
        for p in c.points() {
            assert!(cover.iter().any(|&i| dist2(p, c.point(i)) <= 0.09));
        }
    }

    #[test]
    fn concentration_trivial_cases() {
        let k = circle_points(1.0, 40).unwrap();
        let all = concentration_check(&k, &k, 0.5, 2.5, 100).unwrap();
        assert_eq!(all.flagged, 0);
        assert!(all.probes.iter().all(|p| p.mass == 1.0));
        let tight = concentration_check(&k, &k, 1.0, 0.01, 100).unwrap();
        assert_eq!(tight.flagged, tight.probes.len());
    }

    #[test]
    fn concentration_radius_formula() {
        // ell = 1: w2/sqrt(m0) + 4 m0^{3/2} / alpha
        let eta = concentration_radius(0.1, 0.04, 0.5, 1);
        assert!((eta - (0.5 + 4.0 * 0.008 / 0.5)).abs() < 1e-12);
    }
}
