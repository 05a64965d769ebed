use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::FiniteBlaschkeProduct;
use crate::disc::one_minus_modulus_sq;
use crate::dynamics::{self, DecayConstants};
use crate::error::Result;
use crate::grid::DiskGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochEstimate {
    /// `sup (1 - |z|^2) |F_N'(z)|` over the grid.
    pub value: f64,
    pub argmax: Complex64,
    /// Bound on `sup (1 - |z|^2) |(F - F_N)'(z)|` over the grid; `None` when
    /// some `f^N(z)` has not entered `|w| < r0`.
    pub truncation_error: Option<f64>,
}

/// Bloch seminorm of `F_N` sampled on `zgrid`, with `(f^n)' = prod_{k<n} f'(f^k)`.
///
/// The tail `sum_{n>N} a_n f^n` is controlled by Cauchy's estimate on
/// `|u| = r0`: with `w = f^N(z)`,
/// `(1-|z|^2) |(F - F_N)'(z)| <= tail_sup (1-|z|^2) |(f^N)'(z)| c0 / ((1-c0)(r0-|w|))`.
pub fn bloch_norm_estimate(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    zgrid: &DiskGrid,
    decay: &DecayConstants,
    tail_sup: f64,
) -> Result<BlochEstimate> {
    zgrid.validate()?;
    let points = zgrid.points();
    let per_point: Vec<(f64, Option<f64>)> = points
        .par_iter()
        .map(|z| {
            let mut w = *z;
            let mut derivative = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for a in coeffs {
                derivative *= f.derivative_unchecked(w);
                w = dynamics::step(f, w, false);
                sum += a * derivative;
            }
            let weight = one_minus_modulus_sq(*z);
            let tail = if tail_sup == 0.0 {
                Some(0.0)
            } else if w.norm() < decay.r0 {
                Some(
                    tail_sup * weight * derivative.norm() * decay.c0
                        / ((1.0 - decay.c0) * (decay.r0 - w.norm())),
                )
            } else {
                None
            };
            (weight * sum.norm(), tail)
        })
        .collect();
    let mut best = 0;
    for (k, (v, _)) in per_point.iter().enumerate() {
        if *v > per_point[best].0 {
            best = k;
        }
    }
    let truncation_error = per_point
        .iter()
        .try_fold(0.0f64, |acc, (_, t)| t.map(|t| acc.max(t)));
    Ok(BlochEstimate {
        value: per_point[best].0,
        argmax: points[best],
        truncation_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::named_test_function;

    #[test]
    fn single_term_obeys_schwarz_pick() {
        let f = named_test_function("f3").unwrap();
        let grid = DiskGrid::new(1.0, 12.0, 1.0, 64).unwrap();
        let decay = DecayConstants::prescribed(0.5, 0.5).unwrap();
        let est = bloch_norm_estimate(&f, &[Complex64::new(1.0, 0.0)], &grid, &decay, 0.0).unwrap();
        assert!(est.value <= 1.0 && est.value > 0.0);
        assert_eq!(est.truncation_error, Some(0.0));
    }

    #[test]
    fn homogeneous_and_matches_finite_difference() {
        let f = named_test_function("f2").unwrap();
        let grid = DiskGrid::new(1.0, 6.0, 1.0, 32).unwrap();
        let decay = DecayConstants::prescribed(0.5, 0.5).unwrap();
        let a = vec![Complex64::new(1.0, 0.0); 30];
        let a2: Vec<Complex64> = a.iter().map(|x| x * 2.0).collect();
        let one = bloch_norm_estimate(&f, &a, &grid, &decay, 1.0).unwrap();
        let two = bloch_norm_estimate(&f, &a2, &grid, &decay, 2.0).unwrap();
        assert_eq!(two.value, 2.0 * one.value);
        assert!(one.value.is_finite());

        let z = one.argmax;
        let h = 1e-6;
        let fd = (crate::series::evaluate_direct(&f, &a, z + h).unwrap()
            - crate::series::evaluate_direct(&f, &a, z - h).unwrap())
            / (2.0 * h);
        let direct = one_minus_modulus_sq(z) * fd.norm();
        assert!((direct - one.value).abs() <= 1e-6 * one.value);
    }
}
