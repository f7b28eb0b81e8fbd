use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl BoundingBox {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let b = Self {
            xmin,
            xmax,
            ymin,
            ymax,
        };
        b.validate()?;
        Ok(b)
    }

    /// Bounding box of a planar cloud, inflated by `margin` on every side.
    pub fn around(cloud: &PointCloud, margin: f64) -> Result<Self> {
        if cloud.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: cloud.dim(),
            });
        }
        let mut b = Self {
            xmin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for p in cloud.points() {
            b.xmin = b.xmin.min(p[0]);
            b.xmax = b.xmax.max(p[0]);
            b.ymin = b.ymin.min(p[1]);
            b.ymax = b.ymax.max(p[1]);
        }
        Self::new(
            b.xmin - margin,
            b.xmax + margin,
            b.ymin - margin,
            b.ymax + margin,
        )
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.xmin, self.xmax, self.ymin, self.ymax]
            .iter()
            .all(|v| v.is_finite())
            && self.xmax > self.xmin
            && self.ymax > self.ymin;
        if ok {
            Ok(())
        } else {
            Err(Error::DegenerateBox)
        }
    }
}

/// Samples of a planar function at the cell centers of an `nx x ny` grid,
/// stored row-major (`values[j * nx + i]` sits at column `i`, row `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D {
    bbox: BoundingBox,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(bbox: BoundingBox, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        bbox.validate()?;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 2x2, got {nx}x{ny}"
            )));
        }
        if values.len() != nx * ny {
            return Err(Error::SizeMismatch {
                left: nx * ny,
                right: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            bbox,
            nx,
            ny,
            values,
        })
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn cell_width(&self) -> f64 {
        (self.bbox.xmax - self.bbox.xmin) / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.bbox.ymax - self.bbox.ymin) / self.ny as f64
    }

    /// Grid spacing `h`: the larger cell side.
    pub fn spacing(&self) -> f64 {
        self.cell_width().max(self.cell_height())
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.bbox.xmin + (i as f64 + 0.5) * self.cell_width(),
            self.bbox.ymin + (j as f64 + 0.5) * self.cell_height(),
        ]
    }

    /// Largest difference between 4-adjacent samples.
    pub fn max_neighbor_jump(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.value(i, j);
                if i + 1 < self.nx {
                    worst = worst.max((v - self.value(i + 1, j)).abs());
                }
                if j + 1 < self.ny {
                    worst = worst.max((v - self.value(i, j + 1)).abs());
                }
            }
        }
        worst
    }

    /// Whether adjacent samples differ by at most `h sqrt(2)`, as they must
    /// for a 1-Lipschitz function.
    pub fn is_lipschitz_consistent(&self) -> bool {
        self.max_neighbor_jump() <= self.spacing() * std::f64::consts::SQRT_2 + 1e-9
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `f` at every cell center, in parallel over rows.
pub fn rasterize<F>(f: F, bbox: BoundingBox, nx: usize, ny: usize) -> Result<ScalarField2D>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bbox.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let w = (bbox.xmax - bbox.xmin) / nx as f64;
    let h = (bbox.ymax - bbox.ymin) / ny as f64;
    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = bbox.ymin + (j as f64 + 0.5) * h;
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = f(&[bbox.xmin + (i as f64 + 0.5) * w, y]);
        }
    });
    ScalarField2D::new(bbox, nx, ny, values)
}
