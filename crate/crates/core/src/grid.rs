//! Sampling grids on the circle and in the disc, plus the deterministic
//! reduction used for every quadrature sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `M` equispaced points `xi_j = exp(2 pi i j / M)` with weights `1/M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryGrid {
    pub size: usize,
}

impl BoundaryGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "boundary grid size must be a power of two (got {size})"
            )));
        }
        Ok(Self { size })
    }

    pub fn with_log2(log2: u32) -> Result<Self> {
        if log2 > 30 {
            return Err(Error::InvalidArgument(format!("grid of 2^{log2} points is too large")));
        }
        Self::new(1usize << log2)
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.size as f64
    }

    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(j))
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.size).map(|j| self.point(j)).collect()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.size as f64
    }

    /// Quadrature of samples against normalized Lebesgue measure.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.size);
        pairwise_sum(samples) / self.size as f64
    }

    /// The grid of half the size; its points are the even-indexed points of `self`.
    pub fn coarsened(&self) -> Option<Self> {
        (self.size >= 2).then(|| Self {
            size: self.size / 2,
        })
    }
}

/// Interior sampling: radii `1 - 2^{-j}` for `j = j_min, j_min + j_step, ...,
/// j_max` times `angles` equispaced directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskGrid {
    pub j_min: f64,
    pub j_max: f64,
    #[serde(default = "default_j_step")]
    pub j_step: f64,
    pub angles: usize,
}

fn default_j_step() -> f64 {
    1.0
}

impl DiskGrid {
    pub fn new(j_min: f64, j_max: f64, j_step: f64, angles: usize) -> Result<Self> {
        let grid = Self {
            j_min,
            j_max,
            j_step,
            angles,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j_min > 0.0 && self.j_max >= self.j_min && self.j_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "disk grid ladder needs 0 < j_min <= j_max and j_step > 0 (got {}, {}, {})",
                self.j_min, self.j_max, self.j_step
            )));
        }
        if self.angles == 0 {
            return Err(Error::InvalidArgument("disk grid needs at least one angle".into()));
        }
        if self.radii().iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::InvalidArgument("disk grid radii must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn ladder(&self) -> Vec<f64> {
        let count = ((self.j_max - self.j_min) / self.j_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.j_min + i as f64 * self.j_step).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.ladder().iter().map(|j| 1.0 - (-j).exp2()).collect()
    }

    /// Same ladder span with half the step and twice the angles.
    pub fn doubled(&self) -> Self {
        Self {
            j_min: self.j_min,
            j_max: self.j_max,
            j_step: self.j_step / 2.0,
            angles: self.angles * 2,
        }
    }

    pub fn len(&self) -> usize {
        self.ladder().len() * self.angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in radius-major order.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for r in self.radii() {
            for k in 0..self.angles {
                let theta = 2.0 * PI * k as f64 / self.angles as f64;
                out.push(Complex64::from_polar(r, theta));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Boundary(BoundaryGrid),
    Disk(DiskGrid),
}

impl Grid {
    pub fn points(&self) -> Vec<Complex64> {
        match self {
            Grid::Boundary(g) => g.points(),
            Grid::Disk(g) => g.points(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Boundary(g) => g.size,
            Grid::Disk(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sum in a fixed binary tree: the result depends only on the input order,
/// never on how the caller parallelized the producer.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_grid_requires_power_of_two() {
        assert!(BoundaryGrid::new(1000).is_err());
        assert!(BoundaryGrid::new(0).is_err());
        let g = BoundaryGrid::new(1024).unwrap();
        let weights: Vec<f64> = vec![g.weight(); g.size];
        assert!((pairwise_sum(&weights) - 1.0).abs() < 1e-15);
        assert_eq!(g.point(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn disk_grid_ladder() {
        let g = DiskGrid::new(1.0, 9.0, 1.0, 64).unwrap();
        assert_eq!(g.radii().len(), 9);
        assert_eq!(g.radii()[0], 0.5);
        assert_eq!(g.len(), 9 * 64);
        let d = g.doubled();
        assert_eq!(d.radii().len(), 17);
        assert_eq!(d.angles, 128);
        assert!(DiskGrid::new(0.0, 3.0, 1.0, 8).is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive_on_exact_values() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }
}
