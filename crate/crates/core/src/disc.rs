//! Disc geometry: pseudohyperbolic distance, the Poisson kernel and boundary arcs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::check_open_disc;
use crate::error::{Error, Result};
use crate::tolerances;

/// `rho(z, w) = |z - w| / |1 - conj(w) z|` for `z, w` in the open disc.
pub fn pseudohyperbolic_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_open_disc(z, "pseudohyperbolic distance")?;
    check_open_disc(w, "pseudohyperbolic distance")?;
    Ok(pseudohyperbolic_unchecked(z, w))
}

#[inline]
pub(crate) fn pseudohyperbolic_unchecked(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()
}

/// `1 - |z|^2`, factored to keep relative accuracy near the circle.
#[inline]
pub fn one_minus_modulus_sq(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// Poisson kernel `P(z, xi) = (1 - |z|^2) / |xi - z|^2`.
pub fn poisson_kernel(z: Complex64, xi: Complex64) -> Result<f64> {
    check_open_disc(z, "Poisson kernel")?;
    if (xi.norm() - 1.0).abs() > tolerances::BOUNDARY {
        return Err(Error::Domain(format!(
            "Poisson kernel: |xi| = {} is not on the unit circle",
            xi.norm()
        )));
    }
    Ok(poisson_kernel_unchecked(z, xi))
}

#[inline]
pub(crate) fn poisson_kernel_unchecked(z: Complex64, xi: Complex64) -> f64 {
    one_minus_modulus_sq(z) / (xi - z).norm_sqr()
}

/// A closed subarc of the circle, described by its centre angle and its
/// normalized length `m(I)` (full circle = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arc {
    pub center_angle: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(center_angle: f64, length: f64) -> Result<Self> {
        if !(center_angle.is_finite() && length > 0.0 && length <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "arc needs a finite centre and 0 < length <= 1 (got {center_angle}, {length})"
            )));
        }
        Ok(Self {
            center_angle: normalize_angle(center_angle),
            length,
        })
    }

    pub fn full_circle() -> Self {
        Self {
            center_angle: 0.0,
            length: 1.0,
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.center_angle)
    }

    /// The concentric arc `cI` with `m(cI) = c m(I)`; defined only while `c m(I) <= 1`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let length = factor * self.length;
        if !(factor > 0.0) || length > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "scaled arc of length {length} does not fit on the circle"
            )));
        }
        Ok(Self {
            center_angle: self.center_angle,
            length,
        })
    }

    /// Whether `angle` lies in the arc (closed at both ends).
    pub fn contains_angle(&self, angle: f64) -> bool {
        if self.length >= 1.0 {
            return true;
        }
        let offset = normalize_angle(angle - self.center_angle).abs();
        offset <= PI * self.length
    }

    /// The point `z(I) = (1 - m(I)) xi` over the arc centre.
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(1.0 - self.length, self.center_angle)
    }

    /// The arc `I(z)` centred at `z / |z|` with `m(I(z)) = 1 - |z|`.
    pub fn of_point(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!(
                "I(z) needs 0 < |z| < 1 (got |z| = {r})"
            )));
        }
        Self::new(z.arg(), 1.0 - r)
    }

    /// The `k`-th of the `2^n` dyadic subarcs, counted counter-clockwise.
    pub fn dyadic_child(&self, n: u32, k: u64) -> Result<Self> {
        check_depth(n)?;
        let count = 1u64 << n;
        if k >= count {
            return Err(Error::InvalidArgument(format!(
                "child index {k} out of range for depth {n}"
            )));
        }
        Ok(self.child_unchecked(n, k))
    }

    fn child_unchecked(&self, n: u32, k: u64) -> Self {
        let count = (1u64 << n) as f64;
        let span = 2.0 * PI * self.length;
        let start = self.center_angle - 0.5 * span;
        Self {
            center_angle: normalize_angle(start + (k as f64 + 0.5) * span / count),
            length: self.length / count,
        }
    }

    /// The `2^n` pairwise disjoint dyadic subarcs, lazily.
    pub fn dyadic_children(&self, n: u32) -> Result<DyadicChildren> {
        check_depth(n)?;
        Ok(DyadicChildren {
            parent: *self,
            depth: n,
            next: 0,
            end: 1u64 << n,
        })
    }
}

fn check_depth(n: u32) -> Result<()> {
    if n > tolerances::MAX_DYADIC_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "dyadic depth {n} exceeds {}",
            tolerances::MAX_DYADIC_DEPTH
        )));
    }
    Ok(())
}

pub struct DyadicChildren {
    parent: Arc,
    depth: u32,
    next: u64,
    end: u64,
}

impl Iterator for DyadicChildren {
    type Item = Arc;

    fn next(&mut self) -> Option<Arc> {
        if self.next >= self.end {
            return None;
        }
        let child = self.parent.child_unchecked(self.depth, self.next);
        self.next += 1;
        Some(child)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for DyadicChildren {}

/// Maps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}
