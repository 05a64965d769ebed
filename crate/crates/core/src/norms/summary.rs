use num_complex::Complex64;

use super::{
    bloch_norm_estimate, bmo_norm_estimate, dirichlet_closed, sandwich_constants, norm_l2_gram,
    norm_lp_quadrature, NormOutput,
};
use crate::blaschke::FiniteBlaschkeProduct;
use crate::coefficients::{l2_mass, CoefficientSequence};
use crate::dynamics::estimate_decay_constants;
use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, DiskGrid, Grid};
use crate::series::synthesize_partial_sums;

/// Every norm of `F_N` the library computes, for the `norms` command.
///
/// The Dirichlet form is left out when `N^n` overflows, the Bloch tail bound
/// when no decay constants can be fitted.
pub fn norm_summary(
    f: &FiniteBlaschkeProduct,
    coeffs: &CoefficientSequence,
    n: usize,
    boundary: &BoundaryGrid,
    disk: &DiskGrid,
) -> Result<Vec<NormOutput>> {
    let a = coeffs.prefix(n);
    let lambda = f.derivative_at_origin();
    let mass = l2_mass(&a);
    let (lo, hi) = sandwich_constants(lambda);
    let mut out = vec![
        NormOutput::new("sum_sq", mass),
        NormOutput::new("l2_squared_gram", norm_l2_gram(&a, lambda)?)
            .with_bounds(Some(lo * mass), Some(hi * mass)),
    ];
    let grid = Grid::Boundary(*boundary);
    let field = synthesize_partial_sums(f, coeffs, &grid, n, &[n])?.remove(0);
    for p in [1.0, 2.0, 4.0] {
        let e = norm_lp_quadrature(&field, p)?;
        out.push(NormOutput::new(format!("h{p}_quadrature"), e.value).with_error(e.error_estimate));
    }
    let bmo = bmo_norm_estimate(f, &a, disk)?;
    out.push(
        NormOutput::new("bmoa_squared", bmo.lower_bound)
            .with_bounds(Some(bmo.lower_bound), Some(bmo.upper_bound)),
    );
    match dirichlet_closed(f, &a) {
        Ok(d) => out.push(NormOutput::new("dirichlet", d)),
        Err(Error::Range(_)) => {}
        Err(e) => return Err(e),
    }
    let probes: Vec<Complex64> = (0..256)
        .map(|k| Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / 256.0))
        .collect();
    let sup = coeffs.sup_modulus();
    let bloch = match estimate_decay_constants(f, &probes) {
        Ok(decay) => bloch_norm_estimate(f, &a, disk, &decay, sup)?,
        Err(Error::Rejected(_)) => {
            let decay = crate::dynamics::DecayConstants::prescribed(0.5, 0.5)?;
            let mut b = bloch_norm_estimate(f, &a, disk, &decay, sup)?;
            b.truncation_error = None;
            b
        }
        Err(e) => return Err(e),
    };
    let mut entry = NormOutput::new("bloch", bloch.value);
    if let Some(t) = bloch.truncation_error {
        entry = entry.with_error(t);
    }
    out.push(entry);
    if coeffs.is_l2_summable() {
        out.push(NormOutput::new("l2_tail", coeffs.l2_tail(n)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_is_consistent() {
        let f = crate::named_test_function("f2").unwrap();
        let a = CoefficientSequence::real(&[1.0, -0.5, 0.25]);
        let grid = BoundaryGrid::with_log2(10).unwrap();
        let disk = DiskGrid::new(1.0, 4.0, 1.0, 16).unwrap();
        let s = norm_summary(&f, &a, 3, &grid, &disk).unwrap();
        let get = |name: &str| s.iter().find(|o| o.name == name).unwrap().value;
        assert!((get("h2_quadrature").powi(2) - get("l2_squared_gram")).abs() < 1e-12);
        assert_eq!(get("l2_tail"), 0.0);
    }
}
