use rayon::prelude::*;
use serde::Serialize;

use super::field::{rasterize, BoundingBox};
use super::persistence::{sublevel_persistence, PersistencePair};
use crate::dtm::WitnessedKDistance;
use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, PointCloud};

/// Dimension-1 diagram of the witnessed k-distance for one value of `k`.
#[derive(Clone, Debug, Serialize)]
pub struct VineyardRecord {
    pub k: usize,
    pub m0: f64,
    /// Dimension-1 bars, most persistent first.
    pub bars: Vec<PersistencePair>,
}

impl VineyardRecord {
    pub fn persistences(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.persistence()).collect()
    }

    /// Whether the two most persistent classes each exceed the third by
    /// `factor` (a missing third counts as zero persistence).
    pub fn has_two_prominent(&self, factor: f64) -> bool {
        let p = self.persistences();
        if p.len() < 2 {
            return false;
        }
        let third = p.get(2).copied().unwrap_or(0.0);
        p[1] > 0.0 && p[0] >= factor * third && p[1] >= factor * third
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Vineyard {
    pub n: usize,
    pub records: Vec<VineyardRecord>,
}

impl Vineyard {
    /// Longest run of consecutive records satisfying
    /// [`VineyardRecord::has_two_prominent`], as `(first, last)` record indices.
    pub fn longest_prominent_run(&self, factor: f64) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut start = None;
        for (i, r) in self.records.iter().enumerate() {
            if r.has_two_prominent(factor) {
                let s = *start.get_or_insert(i);
                if best.is_none_or(|(a, b)| i - s > b - a) {
                    best = Some((s, i));
                }
            } else {
                start = None;
            }
        }
        best
    }

    /// Whether some run of at least `min_len` consecutive sweep values shows
    /// two prominent classes.
    pub fn has_prominent_range(&self, min_len: usize, factor: f64) -> bool {
        self.longest_prominent_run(factor)
            .is_some_and(|(a, b)| b - a + 1 >= min_len)
    }
}

/// Parses `start:end:step` (inclusive end) into a list of `k` values.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidParameter(format!("expected start:end[:step], got `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (start, end, step) = match parts.as_slice() {
        [a] => (num(a)?, num(a)?, 1),
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(bad()),
    };
    if step == 0 || start == 0 || end < start {
        return Err(bad());
    }
    Ok((start..=end).step_by(step).collect())
}

/// Independent dimension-1 diagrams of the witnessed k-distance for each
/// `k`, rasterized on the same grid. Runs in parallel over `k`.
pub fn vineyard_sweep(
    cloud: &PointCloud,
    k_values: &[usize],
    bbox: BoundingBox,
    nx: usize,
    ny: usize,
) -> Result<Vineyard> {
    let n = cloud.len();
    if k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "k values must be strictly increasing".into(),
        ));
    }
    for &k in k_values {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k > n {
            return Err(Error::KExceedsSize { k, n });
        }
    }
    let index = NeighborIndex::build(cloud)?;
    let records = k_values
        .par_iter()
        .map(|&k| {
            let wk = WitnessedKDistance::from_index(&index, k)?;
            let field = rasterize(|x| wk.eval(x), bbox, nx, ny)?;
            let diagram = sublevel_persistence(&field);
            let mut bars: Vec<PersistencePair> = diagram.in_dim(1).copied().collect();
            bars.sort_by(|a, b| {
                b.persistence()
                    .total_cmp(&a.persistence())
                    .then(a.birth.total_cmp(&b.birth))
            });
            Ok(VineyardRecord {
                k,
                m0: k as f64 / n as f64,
                bars,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Vineyard { n, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(p: &[f64]) -> VineyardRecord {
        VineyardRecord {
            k: 1,
            m0: 0.1,
            bars: p
                .iter()
                .map(|&d| PersistencePair {
                    dim: 1,
                    birth: 0.0,
                    death: d,
                })
                .collect(),
        }
    }

    #[test]
    fn prominence_rule() {
        assert!(record(&[1.0, 0.8, 0.4]).has_two_prominent(2.0));
        assert!(!record(&[1.0, 0.7, 0.4]).has_two_prominent(2.0));
        assert!(record(&[1.0, 0.5]).has_two_prominent(2.0));
        assert!(!record(&[1.0]).has_two_prominent(2.0));
    }

    #[test]
    fn longest_run() {
        let v = Vineyard {
            n: 10,
            records: vec![
                record(&[1.0, 1.0]),
                record(&[1.0]),
                record(&[1.0, 1.0]),
                record(&[1.0, 1.0, 0.1]),
                record(&[1.0, 1.0]),
                record(&[1.0, 1.0, 0.9]),
            ],
        };
        assert_eq!(v.longest_prominent_run(2.0), Some((2, 4)));
        assert!(v.has_prominent_range(3, 2.0));
        assert!(!v.has_prominent_range(4, 2.0));
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("10:50:20").unwrap(), vec![10, 30, 50]);
        assert_eq!(parse_k_range("3").unwrap(), vec![3]);
        assert!(parse_k_range("0:5").is_err());
        assert!(parse_k_range("5:1").is_err());
        assert!(parse_k_range("1:5:0").is_err());
        assert!(parse_k_range("a:b").is_err());
    }

    #[test]
    fn sweep_validates_k() {
        let c = PointCloud::from_points(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let b = BoundingBox::new(-1.0, 2.0, -1.0, 1.0).unwrap();
        assert!(matches!(
            vineyard_sweep(&c, &[3], b, 8, 8),
            Err(Error::KExceedsSize { .. })
        ));
        assert!(vineyard_sweep(&c, &[2, 1], b, 8, 8).is_err());
    }
}
