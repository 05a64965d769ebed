//! Poisson-weighted variance, the BMOA estimator and harmonic measure.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{check_open_disc, FiniteBlaschkeProduct};
use crate::disc::{one_minus_modulus_sq, poisson_kernel_unchecked, Arc};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, BoundaryGrid, DiskGrid};
use crate::series;
use crate::tolerances;

/// `int |F(xi) - F(z)|^2 P(z, xi) dm(xi)` for the block `F = sum_{n=first}^{first+len-1} a_n f^n`,
/// in closed form `A + 2 Re B` with
/// `A = sum |a_n|^2 (1 - |f^n(z)|^2)` and
/// `B = sum_{n<k} conj(a_n) a_k f^k(z) (1 - |f^n(z)|^2) / f^n(z)`.
///
/// The ratio `f^k(z)/f^n(z)` is replaced by `f'(0)^{k-n}` once `|f^n(z)|`
/// drops below [`tolerances::REMOVABLE_SINGULARITY`].
pub fn poisson_variance_closed(
    f: &FiniteBlaschkeProduct,
    block: &[Complex64],
    first: usize,
    z: Complex64,
) -> Result<f64> {
    Ok(variance_and_weight(f, block, first, z)?.0)
}

/// `(variance, sum |a_n|^2 (1 - |f^n(z)|^2))`.
fn variance_and_weight(
    f: &FiniteBlaschkeProduct,
    block: &[Complex64],
    first: usize,
    z: Complex64,
) -> Result<(f64, f64)> {
    check_open_disc(z, "Poisson variance")?;
    if first == 0 {
        return Err(Error::InvalidArgument("coefficient blocks start at n = 1".into()));
    }
    let mut orbit = Vec::with_capacity(block.len());
    let mut w = dynamics::iterate(f, first, z)?;
    for _ in 0..block.len() {
        orbit.push(w);
        w = dynamics::step(f, w, false);
    }
    let lambda = f.derivative_at_origin();
    let zero = Complex64::new(0.0, 0.0);
    // suffix sums over k > n: sum a_k f^k(z) and sum a_k lambda^{k-n}
    let mut orbit_suffix = zero;
    let mut gram_suffix = zero;
    let mut diag = 0.0;
    let mut cross = zero;
    for n in (0..block.len()).rev() {
        let (a, w) = (block[n], orbit[n]);
        let weight = one_minus_modulus_sq(w);
        diag += a.norm_sqr() * weight;
        let ratio_sum = if w.norm() < tolerances::REMOVABLE_SINGULARITY {
            gram_suffix
        } else {
            orbit_suffix / w
        };
        cross += a.conj() * weight * ratio_sum;
        orbit_suffix += a * w;
        gram_suffix = lambda * (a + gram_suffix);
    }
    Ok((diag + 2.0 * cross.re, diag))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceQuadrature {
    pub value: f64,
    /// Difference to the half-grid value.
    pub error_estimate: f64,
    /// Set when the kernel is narrower than the grid can resolve.
    pub warning: Option<String>,
}

/// The Poisson-weighted variance by boundary quadrature.
pub fn poisson_variance_quadrature(
    f: &FiniteBlaschkeProduct,
    block: &[Complex64],
    first: usize,
    z: Complex64,
    grid: &BoundaryGrid,
) -> Result<VarianceQuadrature> {
    check_open_disc(z, "Poisson variance quadrature")?;
    if z.norm() > tolerances::QUADRATURE_MAX_RADIUS {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds the quadrature limit 1 - 2^-24",
            z.norm()
        )));
    }
    if first == 0 {
        return Err(Error::InvalidArgument("coefficient blocks start at n = 1".into()));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); first - 1];
    coeffs.extend_from_slice(block);
    let boundary = series::boundary_field(f, &coeffs, grid);
    let at_z = series::partial_sums_at(f, &coeffs, &[z], &[coeffs.len()])?[0][0];
    let integrand: Vec<f64> = boundary
        .par_iter()
        .enumerate()
        .map(|(j, v)| (v - at_z).norm_sqr() * poisson_kernel_unchecked(z, grid.point(j)))
        .collect();
    let value = grid.integrate(&integrand);
    let coarse: Vec<f64> = integrand.iter().step_by(2).copied().collect();
    let error_estimate = (pairwise_sum(&coarse) / coarse.len() as f64 - value).abs();
    let resolution = grid.size as f64 * (1.0 - z.norm());
    let warning = (resolution < tolerances::KERNEL_RESOLUTION).then(|| {
        format!(
            "kernel width M(1-|z|) = {resolution:.3} is below {}: quadrature unreliable",
            tolerances::KERNEL_RESOLUTION
        )
    });
    Ok(VarianceQuadrature {
        value,
        error_estimate,
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmoSample {
    pub z: Complex64,
    pub variance: f64,
    /// `sum |a_n|^2 (1 - |f^n(z)|^2)`.
    pub weight: f64,
    /// `variance / weight`, the constant needed at this sample.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoEstimate {
    /// Sup of the variance over the samples: a lower bound for `||F||_BMOA^2`.
    pub lower_bound: f64,
    pub argmax: Complex64,
    pub sum_sq: f64,
    /// Largest `variance / weight` over the samples.
    pub measured_constant: f64,
    /// `measured_constant * sum |a_n|^2`.
    pub upper_bound: f64,
    /// Smallest `C` with `C^{-1} sum |a_n|^2 <= lower_bound <= C sum |a_n|^2`.
    pub sandwich_constant: f64,
    pub samples: Vec<BmoSample>,
}

/// Sup of the Poisson variance of `F_N` over the origin and the points of `zgrid`.
pub fn bmo_norm_estimate(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    zgrid: &DiskGrid,
) -> Result<BmoEstimate> {
    zgrid.validate()?;
    let mut points = vec![Complex64::new(0.0, 0.0)];
    points.extend(zgrid.points());
    let samples: Vec<BmoSample> = points
        .par_iter()
        .map(|z| {
            let (variance, weight) = variance_and_weight(f, coeffs, 1, *z)?;
            let ratio = if weight > 0.0 { variance / weight } else { 0.0 };
            Ok(BmoSample {
                z: *z,
                variance,
                weight,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    let mut best = samples[0];
    for s in &samples {
        if s.variance > best.variance {
            best = *s;
        }
    }
    let sum_sq: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    let measured_constant = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let sandwich_constant = if sum_sq > 0.0 && best.variance > 0.0 {
        (best.variance / sum_sq).max(sum_sq / best.variance)
    } else {
        1.0
    };
    Ok(BmoEstimate {
        lower_bound: best.variance,
        argmax: best.z,
        sum_sq,
        measured_constant,
        upper_bound: measured_constant * sum_sq,
        sandwich_constant,
        samples,
    })
}

/// `w(z, E) = int_E P(z, xi) dm(xi)` for `E` given as a grid indicator.
pub fn harmonic_measure(z: Complex64, indicator: &[bool], grid: &BoundaryGrid) -> Result<f64> {
    check_open_disc(z, "harmonic measure")?;
    if indicator.len() != grid.size {
        return Err(Error::InvalidArgument(format!(
            "indicator has {} entries for a grid of {}",
            indicator.len(),
            grid.size
        )));
    }
    let integrand: Vec<f64> = indicator
        .iter()
        .enumerate()
        .map(|(j, inside)| {
            if *inside {
                poisson_kernel_unchecked(z, grid.point(j))
            } else {
                0.0
            }
        })
        .collect();
    Ok(grid.integrate(&integrand).clamp(0.0, 1.0))
}

/// Closed-form harmonic measure of an arc: `theta / pi - m(I)`, where
/// `theta` is the angle the arc subtends at `z`.
pub fn arc_harmonic_measure(z: Complex64, arc: &Arc) -> Result<f64> {
    check_open_disc(z, "harmonic measure")?;
    if arc.length >= 1.0 {
        return Ok(1.0);
    }
    let half = std::f64::consts::PI * arc.length;
    let start = Complex64::from_polar(1.0, arc.center_angle - half);
    let end = Complex64::from_polar(1.0, arc.center_angle + half);
    let theta = ((end - z).arg() - (start - z).arg()).rem_euclid(2.0 * std::f64::consts::PI);
    Ok((theta / std::f64::consts::PI - arc.length).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::named_test_function;
    use crate::norms::norm_l2_gram;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_reduces_to_gram() {
        let f = named_test_function("f2").unwrap();
        let a = [c(1.0, 0.5), c(-0.3, 0.2), c(0.7, 0.0)];
        let v = poisson_variance_closed(&f, &a, 1, c(0.0, 0.0)).unwrap();
        let g = norm_l2_gram(&a, f.derivative_at_origin()).unwrap();
        assert!((v - g).abs() < 1e-14);
    }

    #[test]
    fn single_term() {
        let f = named_test_function("f3").unwrap();
        let z = c(0.2, -0.6);
        let v = poisson_variance_closed(&f, &[c(2.0, 0.0)], 1, z).unwrap();
        let fz = f.eval(z).unwrap();
        assert!((v - 4.0 * (1.0 - fz.norm_sqr())).abs() < 1e-14);
    }

    #[test]
    fn closed_matches_quadrature() {
        let f = named_test_function("f2").unwrap();
        let grid = BoundaryGrid::new(1 << 14).unwrap();
        let a = [c(1.0, 0.0), c(1.0, 0.0)];
        let z = c(0.3, 0.0);
        let closed = poisson_variance_closed(&f, &a, 1, z).unwrap();
        let quad = poisson_variance_quadrature(&f, &a, 1, z, &grid).unwrap();
        assert!((closed - quad.value).abs() <= 1e-9 * closed);
        assert!(quad.warning.is_none());
        let unit = poisson_variance_quadrature(&f, &[c(1.0, 0.0)], 1, c(0.0, 0.0), &grid).unwrap();
        assert!((unit.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_offset_matches_full_sum() {
        let f = named_test_function("f2").unwrap();
        let grid = BoundaryGrid::new(1 << 14).unwrap();
        let a = [c(0.4, 0.1), c(-1.0, 0.0), c(0.2, 0.3)];
        let z = c(-0.3, 0.4);
        let closed = poisson_variance_closed(&f, &a, 3, z).unwrap();
        let quad = poisson_variance_quadrature(&f, &a, 3, z, &grid).unwrap();
        assert!((closed - quad.value).abs() <= 1e-9 * closed);
    }

    #[test]
    fn coarse_grid_near_boundary_warns() {
        let f = named_test_function("f2").unwrap();
        let grid = BoundaryGrid::new(256).unwrap();
        let q = poisson_variance_quadrature(&f, &[c(1.0, 0.0)], 1, c(0.99, 0.0), &grid).unwrap();
        assert!(q.warning.is_some());
        assert!(poisson_variance_quadrature(&f, &[c(1.0, 0.0)], 1, c(1.0 - 1e-9, 0.0), &grid).is_err());
    }

    #[test]
    fn bmo_includes_origin() {
        let f = named_test_function("f2").unwrap();
        let grid = DiskGrid::new(1.0, 4.0, 1.0, 16).unwrap();
        let est = bmo_norm_estimate(&f, &[c(1.0, 0.0)], &grid).unwrap();
        assert!(est.lower_bound >= 1.0 - 1e-15);
        assert_eq!(est.samples.len(), 1 + grid.len());
    }

    #[test]
    fn harmonic_measure_examples() {
        let grid = BoundaryGrid::new(1 << 12).unwrap();
        let quarter: Vec<bool> = (0..grid.size).map(|j| j < grid.size / 4).collect();
        assert!((harmonic_measure(c(0.0, 0.0), &quarter, &grid).unwrap() - 0.25).abs() < 1e-15);
        let all = vec![true; grid.size];
        assert!((harmonic_measure(c(0.4, -0.7), &all, &grid).unwrap() - 1.0).abs() < 1e-12);

        let upper = Arc::new(PI / 2.0, 0.5).unwrap();
        for z in [c(0.5, 0.0), c(0.0, 0.5), c(-0.2, -0.3)] {
            let exact = arc_harmonic_measure(z, &upper).unwrap();
            // open upper half: j in 1..M/2, endpoints get weight 1/2; the jump
            // limits the trapezoid rule to second order
            let ind: Vec<bool> = (0..grid.size).map(|j| j > 0 && j < grid.size / 2).collect();
            let mut quad = harmonic_measure(z, &ind, &grid).unwrap();
            for j in [0, grid.size / 2] {
                quad += 0.5 * poisson_kernel_unchecked(z, grid.point(j)) / grid.size as f64;
            }
            assert!((exact - quad).abs() < 1e-6, "{z}: {exact} vs {quad}");
        }
        assert!((arc_harmonic_measure(c(0.5, 0.0), &upper).unwrap() - 0.5).abs() < 1e-15);
    }
}
