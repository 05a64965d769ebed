//! Norm and integral functionals of partial sums.

mod bloch;
mod dirichlet;
mod gram;
mod lp;
mod summary;
mod variance;

pub use bloch::{bloch_norm_estimate, BlochEstimate};
pub use dirichlet::{
    dirichlet_closed, dirichlet_coefficient_oracle, dirichlet_sandwich, taylor_coefficients,
    toeplitz_symbol, toeplitz_symbol_bounds, DirichletSandwich, SymbolBounds, TaylorCoefficients,
};
pub use gram::{sandwich_constants, norm_l2_gram};
pub use lp::{mean_power, norm_lp_quadrature, LpEstimate};
pub use summary::norm_summary;
pub use variance::{
    arc_harmonic_measure, bmo_norm_estimate, harmonic_measure, poisson_variance_closed,
    poisson_variance_quadrature, BmoEstimate, BmoSample, VarianceQuadrature,
};

use serde::{Deserialize, Serialize};

/// A named norm value with whatever bracketing information is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormOutput {
    pub name: String,
    pub value: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub error_estimate: Option<f64>,
}

impl NormOutput {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower_bound: None,
            upper_bound: None,
            error_estimate: None,
        }
    }

    pub fn with_bounds(mut self, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower_bound = lower;
        self.upper_bound = upper;
        self
    }

    pub fn with_error(mut self, error: f64) -> Self {
        self.error_estimate = Some(error);
        self
    }
}
