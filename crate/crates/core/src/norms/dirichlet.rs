//! Dirichlet integral of `F`: closed form, Taylor-coefficient oracle and
//! the Toeplitz symbol that brackets the form.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::blaschke::FiniteBlaschkeProduct;
use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, BoundaryGrid};
use crate::series;
use crate::tolerances;

/// `(1/pi) int |F'|^2 dA = sum |a_n|^2 N^n + 2 Re sum_{n<k} conj(a_n) a_k N^n f'(0)^{k-n}`
/// with `N` the degree of `f`.
pub fn dirichlet_closed(f: &FiniteBlaschkeProduct, coeffs: &[Complex64]) -> Result<f64> {
    let degree = f.degree() as f64;
    let log2 = coeffs.len() as f64 * degree.log2();
    if log2 > tolerances::DIRICHLET_LOG2_LIMIT {
        return Err(Error::Range(format!(
            "N^n reaches 2^{log2:.1}, beyond the 2^{} limit",
            tolerances::DIRICHLET_LOG2_LIMIT
        )));
    }
    let lambda = f.derivative_at_origin();
    let mut diag = 0.0;
    // S_k = sum_{n<k} conj(a_n) N^n lambda^{k-n}
    let mut s = Complex64::new(0.0, 0.0);
    let mut cross = Complex64::new(0.0, 0.0);
    for (i, a) in coeffs.iter().enumerate() {
        let n = i + 1;
        if i > 0 {
            s = lambda * (s + coeffs[i - 1].conj() * degree.powi(n as i32 - 1));
            cross += a * s;
        }
        diag += a.norm_sqr() * degree.powi(n as i32);
    }
    Ok(diag + 2.0 * cross.re)
}

/// `sum_{m >= 1} m |c_m|^2`, the Dirichlet integral over `pi` of `sum c_m z^m`.
pub fn dirichlet_coefficient_oracle(coeffs: &[Complex64]) -> f64 {
    let terms: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| m as f64 * c.norm_sqr())
        .collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    /// `c_0, ..., c_D`.
    pub coefficients: Vec<Complex64>,
    pub radius: f64,
    /// Max of `|sum c_m z^m - F(z)|` over a check circle of radius `radius / 2`.
    pub residual: f64,
}

const CHECK_POINTS: usize = 64;

/// Taylor coefficients of `F_N` from samples on the circle of radius `r`:
/// `c_m = r^{-m} (1/M) sum_j F(r xi_j) xi_j^{-m}` via FFT.
pub fn taylor_coefficients(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    degree: usize,
    radius: f64,
    grid: &BoundaryGrid,
) -> Result<TaylorCoefficients> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r < 1 (got {radius})")));
    }
    if grid.size < 4 * degree {
        return Err(Error::InvalidArgument(format!(
            "grid of {} points is too coarse for degree {degree} (need M >= 4D)",
            grid.size
        )));
    }
    if degree as f64 * -radius.ln() > f64::MAX.ln() {
        return Err(Error::Range(format!(
            "r^-D overflows for r = {radius}, D = {degree}"
        )));
    }
    let points: Vec<Complex64> = (0..grid.size).map(|j| grid.point(j) * radius).collect();
    let mut buffer: Vec<Complex64> = series::partial_sums_at(f, coeffs, &points, &[coeffs.len()])?
        .into_iter()
        .map(|v| v[0])
        .collect();
    FftPlanner::new().plan_fft_forward(grid.size).process(&mut buffer);
    let scale = 1.0 / grid.size as f64;
    let coefficients: Vec<Complex64> = buffer[..=degree]
        .iter()
        .enumerate()
        .map(|(m, x)| x * scale * radius.powi(-(m as i32)))
        .collect();

    let check_radius = radius / 2.0;
    let check: Vec<Complex64> = (0..CHECK_POINTS)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CHECK_POINTS as f64;
            Complex64::from_polar(check_radius, theta)
        })
        .collect();
    let exact = series::partial_sums_at(f, coeffs, &check, &[coeffs.len()])?;
    let residual = check
        .iter()
        .zip(&exact)
        .map(|(z, e)| (horner(&coefficients, *z) - e[0]).norm())
        .fold(0.0, f64::max);
    Ok(TaylorCoefficients {
        coefficients,
        radius,
        residual,
    })
}

fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Range of the Toeplitz symbol `t(xi) = (1 - rho^2) / |1 - lambda N^{-1/2} xi|^2`, `rho = |lambda| N^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolBounds {
    pub t_min: f64,
    pub t_max: f64,
    /// `(1 + rho) / (1 - rho)`.
    pub cf_n: f64,
}

pub fn toeplitz_symbol_bounds(lambda: Complex64, degree: usize) -> Result<SymbolBounds> {
    check_symbol_args(lambda, degree)?;
    let rho = lambda.norm() / (degree as f64).sqrt();
    Ok(SymbolBounds {
        t_min: (1.0 - rho) / (1.0 + rho),
        t_max: (1.0 + rho) / (1.0 - rho),
        cf_n: (1.0 + rho) / (1.0 - rho),
    })
}

pub fn toeplitz_symbol(lambda: Complex64, degree: usize, xi: Complex64) -> Result<f64> {
    check_symbol_args(lambda, degree)?;
    let g = lambda / (degree as f64).sqrt();
    Ok((1.0 - g.norm_sqr()) / (Complex64::new(1.0, 0.0) - g * xi).norm_sqr())
}

fn check_symbol_args(lambda: Complex64, degree: usize) -> Result<()> {
    if degree < 2 || !(lambda.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "symbol needs N >= 2 and |lambda| < 1 (got N = {degree}, |lambda| = {})",
            lambda.norm()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletSandwich {
    /// `sum |a_n|^2 N^n`.
    pub weighted_sum: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl DirichletSandwich {
    /// `min(value - lower, upper - value)`.
    pub fn margin(&self) -> f64 {
        (self.value - self.lower).min(self.upper - self.value)
    }
}

/// `C(f,N)^{-1} sum |a_n|^2 N^n <= dirichlet_closed <= C(f,N) sum |a_n|^2 N^n`.
pub fn dirichlet_sandwich(f: &FiniteBlaschkeProduct, coeffs: &[Complex64]) -> Result<DirichletSandwich> {
    let bounds = toeplitz_symbol_bounds(f.derivative_at_origin(), f.degree())?;
    let value = dirichlet_closed(f, coeffs)?;
    let degree = f.degree() as f64;
    let weighted_sum: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * degree.powi(i as i32 + 1))
        .sum();
    let out = DirichletSandwich {
        weighted_sum,
        lower: weighted_sum / bounds.cf_n,
        value,
        upper: weighted_sum * bounds.cf_n,
    };
    debug_assert!(out.margin() >= -1e-12 * weighted_sum.max(1.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::named_test_function;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn closed_form_examples() {
        let f1 = named_test_function("f1").unwrap();
        let f2 = named_test_function("f2").unwrap();
        assert_eq!(dirichlet_closed(&f1, &[c(1.0), c(0.5)]).unwrap(), 3.0);
        assert_eq!(dirichlet_closed(&f2, &[c(1.0)]).unwrap(), 2.0);
        assert_eq!(dirichlet_closed(&f2, &[c(1.0), c(1.0)]).unwrap(), 4.0);
        assert!(matches!(
            dirichlet_closed(&f1, &vec![c(1.0); 501]),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(dirichlet_coefficient_oracle(&[c(0.0), c(1.0)]), 1.0);
        assert_eq!(
            dirichlet_coefficient_oracle(&[c(0.0), c(0.0), c(1.0), c(0.0), c(0.5)]),
            3.0
        );
    }

    #[test]
    fn taylor_examples() {
        let grid = BoundaryGrid::new(256).unwrap();
        let f1 = named_test_function("f1").unwrap();
        let t = taylor_coefficients(&f1, &[c(1.0)], 32, 0.9, &grid).unwrap();
        assert!((t.coefficients[2] - c(1.0)).norm() < 1e-10);
        for (m, v) in t.coefficients.iter().enumerate() {
            if m != 2 {
                assert!(v.norm() < 1e-10, "c_{m} = {v}");
            }
        }
        let f2 = named_test_function("f2").unwrap();
        let a1 = Complex64::new(0.3, -0.8);
        let t = taylor_coefficients(&f2, &[a1], 32, 0.9, &grid).unwrap();
        assert!((t.coefficients[1] - a1 * f2.derivative_at_origin()).norm() < 1e-10);
        assert!(t.residual < 1e-8);
        assert!(taylor_coefficients(&f2, &[a1], 128, 0.9, &grid).is_err());
        assert!(matches!(
            taylor_coefficients(&f2, &[a1], 64, 1e-300, &grid),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn coefficient_oracle_matches_closed_form_for_short_series() {
        let grid = BoundaryGrid::new(1 << 10).unwrap();
        let f2 = named_test_function("f2").unwrap();
        let a = [c(1.0), c(1.0)];
        let t = taylor_coefficients(&f2, &a, 200, 0.95, &grid).unwrap();
        let oracle = dirichlet_coefficient_oracle(&t.coefficients);
        assert!((oracle - 4.0).abs() < 1e-6, "{oracle}");
    }

    #[test]
    fn symbol_bounds() {
        let b = toeplitz_symbol_bounds(c(0.0), 2).unwrap();
        assert_eq!((b.t_min, b.t_max, b.cf_n), (1.0, 1.0, 1.0));
        let b = toeplitz_symbol_bounds(c(-0.5), 2).unwrap();
        assert!((b.cf_n - 2.0938).abs() < 1e-4);
        assert!((b.t_min - 0.4776).abs() < 1e-4);
        assert!((b.t_min * b.t_max - 1.0).abs() < 1e-12);
        let t1 = toeplitz_symbol(c(-0.5), 2, c(-1.0)).unwrap();
        assert!((t1 - b.t_max).abs() < 1e-12);
        assert!(toeplitz_symbol_bounds(c(0.5), 1).is_err());
    }

    #[test]
    fn sandwich_holds() {
        let f2 = named_test_function("f2").unwrap();
        let s = dirichlet_sandwich(&f2, &[c(1.0), c(-1.0), c(0.5)]).unwrap();
        assert!(s.margin() >= 0.0);
    }
}
