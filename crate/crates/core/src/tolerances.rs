//! Numerical thresholds shared by every module.
//!
//! Per-check pass tolerances live in the check registry; the values here govern domain membership,
//! degeneracy guards and the regime switches inside the algorithms.

/// Slack allowed when testing whether a point lies on (or inside) the unit circle.
pub const BOUNDARY: f64 = 1e-12;

/// Allowed deviation of `|rotation|` from one.
pub const ROTATION_MODULUS: f64 = 1e-14;

/// Zeros must satisfy `|alpha| < 1 - ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-12;

/// Orbits are truncated to exactly zero once their modulus drops below this.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Below this modulus `h(w)/w` is replaced by its value at the removable singularity.
pub const REMOVABLE_SINGULARITY: f64 = 1e-8;

/// RMS residual (in log-modulus) above which a geometric decay fit is rejected.
pub const REGIME_RESIDUAL: f64 = 1e-2;

/// Default cap on the number of iterates any single orbit computation may take.
pub const MAX_ITERATIONS: usize = 10_000;

/// Cap on `n` for hyperbolic derivatives of iterates.
pub const MAX_DERIVATIVE_ITERATES: usize = 1_000;

pub const MAX_DYADIC_DEPTH: u32 = 40;

/// Poisson-variance quadrature warns when `M * (1 - |z|)` falls below this.
pub const KERNEL_RESOLUTION: f64 = 64.0;

/// Largest `|z|` accepted by boundary quadrature of Poisson integrals.
pub const QUADRATURE_MAX_RADIUS: f64 = 1.0 - 1.0 / (1u64 << 24) as f64;

/// `N^n` in the Dirichlet form is rejected once `n * log2(N)` exceeds this.
pub const DIRICHLET_LOG2_LIMIT: f64 = 500.0;

/// Relative step of the central finite difference used to cross-check derivatives.
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-6;

/// Relative difference between `x` and `y`, with `0/0` read as exact
/// agreement and any non-finite operand as infinite disagreement.
pub fn relative_error(x: f64, y: f64) -> f64 {
    if x == y && x.is_finite() {
        return 0.0;
    }
    if !(x.is_finite() && y.is_finite()) {
        return f64::INFINITY;
    }
    (x - y).abs() / x.abs().max(y.abs())
}
