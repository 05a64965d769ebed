use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Grid};
use crate::series::FieldOfValues;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpEstimate {
    /// `(mean |F|^p)^{1/p}` on the full grid.
    pub value: f64,
    /// Difference to the same quantity on the half grid.
    pub error_estimate: f64,
}

/// `(1/M) sum_j |v_j|^p`, reduced pairwise.
pub fn mean_power(values: &[Complex64], p: f64) -> f64 {
    let powers: Vec<f64> = if p == 2.0 {
        values.iter().map(|v| v.norm_sqr()).collect()
    } else {
        values.iter().map(|v| v.norm().powf(p)).collect()
    };
    pairwise_sum(&powers) / values.len() as f64
}

/// `||F_N||_p` by trapezoid quadrature of boundary samples.
pub fn norm_lp_quadrature(field: &FieldOfValues, p: f64) -> Result<LpEstimate> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must be positive (got {p})")));
    }
    if !matches!(field.grid, Grid::Boundary(_)) {
        return Err(Error::InvalidArgument(
            "L^p quadrature needs a boundary grid".into(),
        ));
    }
    let value = mean_power(&field.values, p).powf(1.0 / p);
    let error_estimate = if field.values.len() >= 2 {
        let coarse: Vec<Complex64> = field.values.iter().step_by(2).copied().collect();
        (mean_power(&coarse, p).powf(1.0 / p) - value).abs()
    } else {
        f64::INFINITY
    };
    Ok(LpEstimate {
        value,
        error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::named_test_function;
    use crate::coefficients::CoefficientSequence;
    use crate::grid::BoundaryGrid;
    use crate::series::synthesize_partial_sums;

    fn field(name: &str, a: &[f64], m: usize) -> FieldOfValues {
        let f = named_test_function(name).unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(m).unwrap());
        let seq = CoefficientSequence::real(a);
        synthesize_partial_sums(&f, &seq, &grid, a.len(), &[a.len()])
            .unwrap()
            .remove(0)
    }

    #[test]
    fn constant_and_unimodular() {
        let grid = Grid::Boundary(BoundaryGrid::new(8).unwrap());
        let one = FieldOfValues {
            grid,
            n: 0,
            values: vec![Complex64::new(1.0, 0.0); 8],
        };
        for p in [0.5, 1.0, 2.0, 7.0] {
            assert!((norm_lp_quadrature(&one, p).unwrap().value - 1.0).abs() < 1e-15);
        }
        let v = norm_lp_quadrature(&field("f1", &[1.0], 64), 4.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_oracle() {
        let v = norm_lp_quadrature(&field("f1", &[1.0, 1.0], 64), 2.0).unwrap();
        assert!((v.value * v.value - 2.0).abs() < 1e-14);
        assert!(v.error_estimate < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let fv = field("f1", &[1.0], 8);
        assert!(norm_lp_quadrature(&fv, 0.0).is_err());
    }
}
