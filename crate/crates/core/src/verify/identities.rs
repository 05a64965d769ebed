//! Exact identities, each compared against an independent quadrature or
//! brute-force evaluation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use super::{Strict, random_in_disc, random_prefix, test_function, CheckContext, Outcome};
use crate::dynamics::{hyperbolic_derivative_iterate, DerivativeMethod};
use crate::error::Result;
use crate::grid::{BoundaryGrid, Grid};
use crate::norms::{
    dirichlet_closed, dirichlet_coefficient_oracle, dirichlet_sandwich, norm_l2_gram,
    norm_lp_quadrature, poisson_variance_closed, poisson_variance_quadrature, taylor_coefficients,
    toeplitz_symbol_bounds, NormOutput,
};
use crate::disc::poisson_kernel_unchecked;
use crate::series::{self, FieldOfValues};
use crate::tolerances::relative_error;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GramParams {
    pub function: String,
    pub prefixes: usize,
    pub length: usize,
    pub grid_log2: u32,
}

impl Default for GramParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            prefixes: 100,
            length: 12,
            grid_log2: 16,
        }
    }
}

/// `||F_N||_2^2` by boundary quadrature against the Gram form.
pub fn gram_identity(ctx: &CheckContext) -> Result<Outcome> {
    let p: GramParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let mut rng = ctx.rng();
    let prefixes: Vec<Vec<Complex64>> = (0..p.prefixes).map(|_| random_prefix(&mut rng, p.length)).collect();
    let lambda = f.derivative_at_origin();
    let mut worst = 0.0f64;
    let mut errors = Vec::with_capacity(prefixes.len());
    let mut out = Outcome::new();
    for (k, a) in prefixes.iter().enumerate() {
        let field = FieldOfValues {
            grid: Grid::Boundary(grid),
            n: a.len(),
            values: series::boundary_field(&f, a, &grid),
        };
        let lp = norm_lp_quadrature(&field, 2.0)?;
        let quad = lp.value * lp.value;
        let gram = norm_l2_gram(a, lambda)?;
        let err = relative_error(quad, gram);
        worst = worst.smax(err);
        errors.push([k as f64, err]);
        if k == 0 {
            out.norms.push(NormOutput::new("l2_squared_gram", gram));
            out.norms.push(
                NormOutput::new("l2_squared_quadrature", quad)
                    .with_error(2.0 * lp.value * lp.error_estimate),
            );
        }
    }
    out.measure("max_relative_error", worst)
        .measure("grid_size", grid.size as f64)
        .series("relative_error_by_prefix", errors)
        .condition("relative_error", -worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VarianceIdentityParams {
    pub function: String,
    pub length: usize,
    pub points: Vec<[f64; 2]>,
    pub grid_log2: u32,
}

impl Default for VarianceIdentityParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            length: 10,
            points: vec![[0.3, 0.2], [-0.5, 0.0], [0.0, 0.7]],
            grid_log2: 16,
        }
    }
}

/// Closed-form Poisson variance against boundary quadrature.
pub fn poisson_variance_identity(ctx: &CheckContext) -> Result<Outcome> {
    let p: VarianceIdentityParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let a = random_prefix(&mut ctx.rng(), p.length);
    let mut out = Outcome::new();
    let mut worst = 0.0f64;
    for [re, im] in &p.points {
        let z = Complex64::new(*re, *im);
        let closed = poisson_variance_closed(&f, &a, 1, z)?;
        let quad = poisson_variance_quadrature(&f, &a, 1, z, &grid)?;
        let err = relative_error(closed, quad.value);
        worst = worst.smax(err);
        let label = format!("z={re}{im:+}i");
        out.measure(format!("relative_error[{label}]"), err);
        out.norms.push(NormOutput::new(format!("variance_closed[{label}]"), closed));
        out.norms.push(
            NormOutput::new(format!("variance_quadrature[{label}]"), quad.value)
                .with_error(quad.error_estimate),
        );
        if let Some(w) = quad.warning {
            out.note(format!("{label}: {w}"));
        }
    }
    out.measure("max_relative_error", worst)
        .condition("relative_error", -worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproducingParams {
    pub function: String,
    /// `g = f^iterate` is reproduced.
    pub iterate: usize,
    pub point: [f64; 2],
    pub grid_log2: u32,
    pub normalization_grid_log2: u32,
    pub normalization_radii: Vec<f64>,
    pub normalization_angles: usize,
}

impl Default for ReproducingParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            iterate: 2,
            point: [0.3, 0.2],
            grid_log2: 16,
            normalization_grid_log2: 10,
            normalization_radii: vec![0.0, 0.5, 0.9],
            normalization_angles: 16,
        }
    }
}

/// `int P(z, .) dm = 1` and `int g P(z, .) dm = g(z)` for `g = f^2`.
pub fn poisson_reproducing(ctx: &CheckContext) -> Result<Outcome> {
    let p: ReproducingParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let z = Complex64::new(p.point[0], p.point[1]);
    crate::blaschke::check_open_disc(z, "reproducing point")?;
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); p.iterate];
    coeffs[p.iterate - 1] = Complex64::new(1.0, 0.0);
    let boundary = series::boundary_field(&f, &coeffs, &grid);
    let integrand: Vec<Complex64> = boundary
        .iter()
        .enumerate()
        .map(|(j, g)| g * poisson_kernel_unchecked(z, grid.point(j)))
        .collect();
    let quad = crate::grid::pairwise_sum_complex(&integrand) / grid.size as f64;
    let exact = crate::dynamics::iterate(&f, p.iterate, z)?;
    let reproducing = (quad - exact).norm() / exact.norm();

    let coarse = BoundaryGrid::with_log2(p.normalization_grid_log2)?;
    let mut normalization = 0.0f64;
    for r in &p.normalization_radii {
        for k in 0..p.normalization_angles {
            let w = Complex64::from_polar(*r, 2.0 * std::f64::consts::PI * k as f64 / p.normalization_angles as f64);
            crate::blaschke::check_open_disc(w, "normalization point")?;
            let kernel: Vec<f64> = (0..coarse.size)
                .map(|j| poisson_kernel_unchecked(w, coarse.point(j)))
                .collect();
            normalization = normalization.smax((coarse.integrate(&kernel) - 1.0).abs());
        }
    }
    let mut out = Outcome::new();
    out.measure("reproducing_relative_error", reproducing)
        .measure("normalization_error", normalization)
        .condition("reproducing", -reproducing, ctx.tolerance)
        .condition("normalization", -normalization, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainRuleParams {
    pub functions: Vec<String>,
    pub points: usize,
    pub max_iterate: usize,
    pub radius: f64,
}

impl Default for ChainRuleParams {
    fn default() -> Self {
        Self {
            functions: vec!["f1".into(), "f2".into(), "f3".into()],
            points: 1000,
            max_iterate: 20,
            radius: 0.999,
        }
    }
}

/// Hyperbolic derivative of `f^n`: direct formula against the product along the orbit.
pub fn chain_rule(ctx: &CheckContext) -> Result<Outcome> {
    let p: ChainRuleParams = ctx.params()?;
    let mut rng = ctx.rng();
    let points: Vec<Complex64> = (0..p.points).map(|_| random_in_disc(&mut rng, p.radius)).collect();
    let mut out = Outcome::new();
    let mut worst = 0.0f64;
    for name in &p.functions {
        let f = test_function(name)?;
        let per_point: Vec<f64> = points
            .par_iter()
            .map(|z| {
                let mut d = 0.0f64;
                for n in 1..=p.max_iterate {
                    let direct = hyperbolic_derivative_iterate(&f, n, *z, DerivativeMethod::Direct)?;
                    let chain = hyperbolic_derivative_iterate(&f, n, *z, DerivativeMethod::Chain)?;
                    d = d.smax((direct - chain).abs());
                }
                Ok(d)
            })
            .collect::<Result<_>>()?;
        let m = per_point.iter().copied().fold(0.0, Strict::smax);
        out.measure(format!("max_abs_difference[{name}]"), m);
        worst = worst.smax(m);
    }
    out.measure("max_abs_difference", worst)
        .condition("abs_difference", -worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirichletParams {
    pub functions: Vec<String>,
    pub length: usize,
    pub radius: f64,
    pub grid_log2: u32,
    pub degree: usize,
    pub sandwich_tolerance: f64,
}

impl Default for DirichletParams {
    fn default() -> Self {
        Self {
            functions: vec!["f1".into(), "f2".into()],
            length: 10,
            radius: 0.9,
            grid_log2: 18,
            degree: 1 << 12,
            sandwich_tolerance: 1e-12,
        }
    }
}

/// Dirichlet integral three ways: closed form, Taylor coefficients, Toeplitz symbol bounds.
pub fn dirichlet_three_way(ctx: &CheckContext) -> Result<Outcome> {
    let p: DirichletParams = ctx.params()?;
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let a = random_prefix(&mut ctx.rng(), p.length);
    let mut out = Outcome::new();
    let mut worst = 0.0f64;
    for name in &p.functions {
        let f = test_function(name)?;
        let closed = dirichlet_closed(&f, &a)?;
        let taylor = taylor_coefficients(&f, &a, p.degree, p.radius, &grid)?;
        let oracle = dirichlet_coefficient_oracle(&taylor.coefficients);
        let err = relative_error(closed, oracle);
        worst = worst.smax(err);
        let sandwich = dirichlet_sandwich(&f, &a)?;
        let bounds = toeplitz_symbol_bounds(f.derivative_at_origin(), f.degree())?;
        out.measure(format!("closed[{name}]"), closed)
            .measure(format!("coefficient_oracle[{name}]"), oracle)
            .measure(format!("relative_error[{name}]"), err)
            .measure(format!("taylor_residual[{name}]"), taylor.residual)
            .measure(format!("cf_n[{name}]"), bounds.cf_n)
            .condition(
                format!("sandwich[{name}]"),
                sandwich.margin() / sandwich.weighted_sum,
                p.sandwich_tolerance,
            )
            .condition(
                format!("symbol_product[{name}]"),
                -(bounds.t_min * bounds.t_max - 1.0).abs(),
                p.sandwich_tolerance,
            );
        out.norms.push(
            NormOutput::new(format!("dirichlet[{name}]"), closed)
                .with_bounds(Some(sandwich.lower), Some(sandwich.upper))
                .with_error((closed - oracle).abs()),
        );
        if f.derivative_at_origin() == Complex64::new(0.0, 0.0) {
            let degree = f.degree() as f64;
            let mut diagonal = 0.0;
            for (i, c) in a.iter().enumerate() {
                diagonal += c.norm_sqr() * degree.powi(i as i32 + 1);
            }
            out.condition(format!("diagonal_exact[{name}]"), -(closed - diagonal).abs(), 0.0);
        }
    }
    out.measure("max_relative_error", worst)
        .condition("relative_error", -worst, ctx.tolerance);
    Ok(out)
}
