//! Iteration of `f`: orbits, hyperbolic derivatives, Denjoy-Wolff decay
//! constants and the Königs linearization at the attracting fixed point 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::{check_closed_disc, check_open_disc, FiniteBlaschkeProduct};
use crate::disc::one_minus_modulus_sq;
use crate::error::{Error, Result};
use crate::tolerances;

/// One step of the orbit. Points on the circle are renormalized to modulus
/// one (the exact image is unimodular); interior points are flushed to zero
/// once they drop below the underflow floor.
#[inline]
pub(crate) fn step(f: &FiniteBlaschkeProduct, w: Complex64, on_circle: bool) -> Complex64 {
    if on_circle {
        return f.eval_on_circle(w);
    }
    let next = f.eval_unchecked(w);
    if next.norm() < tolerances::UNDERFLOW_FLOOR {
        Complex64::new(0.0, 0.0)
    } else {
        next
    }
}

#[inline]
pub(crate) fn is_on_circle(z: Complex64) -> bool {
    (z.norm() - 1.0).abs() <= tolerances::BOUNDARY
}

/// `f^n(z)`, the `n`-th iterate (`f^0` is the identity).
pub fn iterate(f: &FiniteBlaschkeProduct, n: usize, z: Complex64) -> Result<Complex64> {
    check_closed_disc(z)?;
    check_iterations(n)?;
    let on_circle = is_on_circle(z);
    let mut w = z;
    for _ in 0..n {
        w = step(f, w, on_circle);
    }
    Ok(w)
}

fn check_iterations(n: usize) -> Result<()> {
    if n > tolerances::MAX_ITERATIONS {
        return Err(Error::InvalidArgument(format!(
            "{n} iterates requested, limit is {}",
            tolerances::MAX_ITERATIONS
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: Complex64,
    /// `values[n] = f^n(start)` for `n = 0..=n_max`.
    pub values: Vec<Complex64>,
}

pub fn orbit(f: &FiniteBlaschkeProduct, z: Complex64, n_max: usize) -> Result<OrbitRecord> {
    check_closed_disc(z)?;
    check_iterations(n_max)?;
    let on_circle = is_on_circle(z);
    let mut values = Vec::with_capacity(n_max + 1);
    let mut w = z;
    values.push(w);
    for _ in 0..n_max {
        w = step(f, w, on_circle);
        values.push(w);
    }
    Ok(OrbitRecord { start: z, values })
}

/// `D_h(f)(z) = (1 - |z|^2) |f'(z)| / (1 - |f(z)|^2)`.
pub fn hyperbolic_derivative(f: &FiniteBlaschkeProduct, z: Complex64) -> Result<f64> {
    check_open_disc(z, "hyperbolic derivative")?;
    hyperbolic_derivative_unchecked(f, z)
}

fn hyperbolic_derivative_unchecked(f: &FiniteBlaschkeProduct, z: Complex64) -> Result<f64> {
    let denom = one_minus_modulus_sq(f.eval_unchecked(z));
    if !(denom > 0.0) {
        return Err(Error::NumericalDegeneracy(format!(
            "1 - |f(z)|^2 = {denom} at interior point z = {z}"
        )));
    }
    Ok(one_minus_modulus_sq(z) * f.derivative_unchecked(z).norm() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    /// `(1 - |z|^2) |(f^n)'(z)| / (1 - |f^n(z)|^2)` with `(f^n)'` from the orbit.
    Direct,
    /// Product of `D_h(f)` along the orbit.
    Chain,
}

/// Hyperbolic derivative of the iterate `f^n`.
pub fn hyperbolic_derivative_iterate(
    f: &FiniteBlaschkeProduct,
    n: usize,
    z: Complex64,
    method: DerivativeMethod,
) -> Result<f64> {
    check_open_disc(z, "hyperbolic derivative of an iterate")?;
    if n == 0 || n > tolerances::MAX_DERIVATIVE_ITERATES {
        return Err(Error::InvalidArgument(format!(
            "n must lie in 1..={} (got {n})",
            tolerances::MAX_DERIVATIVE_ITERATES
        )));
    }
    let mut w = z;
    match method {
        DerivativeMethod::Chain => {
            let mut product = 1.0;
            for _ in 0..n {
                product *= hyperbolic_derivative_unchecked(f, w)?;
                w = step(f, w, false);
            }
            Ok(product)
        }
        DerivativeMethod::Direct => {
            let mut derivative = Complex64::new(1.0, 0.0);
            for _ in 0..n {
                derivative *= f.derivative_unchecked(w);
                w = step(f, w, false);
            }
            let denom = one_minus_modulus_sq(w);
            if !(denom > 0.0) {
                return Err(Error::NumericalDegeneracy(format!(
                    "1 - |f^n(z)|^2 = {denom} at interior point z = {z}"
                )));
            }
            Ok(one_minus_modulus_sq(z) * derivative.norm() / denom)
        }
    }
}

/// `psi(x) = x (x + |f'(0)|) / (1 + |f'(0)| x)`, the radial majorant `|f(z)| <= psi(|z|)`.
pub fn schwarz_majorant(f: &FiniteBlaschkeProduct, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("majorant needs 0 <= x < 1 (got {x})")));
    }
    let lam = f.derivative_at_origin().norm();
    Ok(x * (x + lam) / (1.0 + lam * x))
}

/// The constant `c = (1 + |f'(0)| r) / (1 + r)` for which `1 - |z| <= c (1 - |f(z)|)` on `|z| >= r`.
pub fn distance_constant(f: &FiniteBlaschkeProduct, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r < 1 (got {r})")));
    }
    let lam = f.derivative_at_origin().norm();
    Ok((1.0 + lam * r) / (1.0 + r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    Fitted,
    Prescribed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayRegime {
    /// `|f^n(z)|` decays like `c0^n`.
    Geometric,
    /// `f'(0) = 0`: the exponent multiplies at every step.
    Superattracting,
}

/// Constants with `|f^n(z)| <= r0^{-1} c0^n |z|` whenever `|z| <= r0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    pub r0: f64,
    pub c0: f64,
    pub source: ConstantSource,
    pub regime: DecayRegime,
}

impl DecayConstants {
    pub fn prescribed(r0: f64, c0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < 1.0 && c0 > 0.0 && c0 < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "decay constants need 0 < r0, c0 < 1 (got {r0}, {c0})"
            )));
        }
        Ok(Self {
            r0,
            c0,
            source: ConstantSource::Prescribed,
            regime: DecayRegime::Geometric,
        })
    }

    pub fn bound(&self, n: usize, z_modulus: f64) -> f64 {
        self.c0.powi(n as i32) * z_modulus / self.r0
    }
}

/// Fraction of `1/K` used for `r0`, where `K` is the largest observed ratio
/// `|f^n(z)| / (c0^n |z|)` over the probe orbits.
const R0_SAFETY: f64 = 0.9;

/// Iterates below `FIT_CEILING * min(1, |f'(0)|)` enter the geometric fit;
/// the quadratic term of `f` is then small against the linear one.
const FIT_CEILING: f64 = 0.1;

/// Fits `(r0, c0)` from probe orbits.
///
/// For `f'(0) != 0` the slope of `log|f^n(z)|` against `n` is fitted by least
/// squares per probe and `c0 = exp(mean slope)`; `r0` is then chosen so the
/// bound holds on every probe orbit. When the fit residual exceeds
/// [`tolerances::REGIME_RESIDUAL`] and the log-moduli at least double per
/// step, the superattracting regime is flagged and the constants
/// `r0 = c0 = 1/2` are prescribed instead.
pub fn estimate_decay_constants(
    f: &FiniteBlaschkeProduct,
    probes: &[Complex64],
) -> Result<DecayConstants> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes supplied".into()));
    }
    if let Some(z) = probes.iter().find(|z| z.norm() > 0.5 + tolerances::BOUNDARY) {
        return Err(Error::InvalidArgument(format!(
            "probe {z} lies outside |z| <= 1/2"
        )));
    }
    let probes: Vec<Complex64> = probes.iter().copied().filter(|z| z.norm() > 0.0).collect();
    if probes.is_empty() {
        return Err(Error::Rejected("every probe is the fixed point 0".into()));
    }

    let orbits: Vec<Vec<Complex64>> = probes
        .iter()
        .map(|z| truncated_orbit(f, *z))
        .collect::<Result<_>>()?;

    let window = FIT_CEILING * f.derivative_at_origin().norm().min(1.0);
    match fit_geometric(&orbits, window) {
        Some((c0, residual)) if residual <= tolerances::REGIME_RESIDUAL && c0 < 1.0 => {
            let mut worst = 0.0f64;
            for orbit in &orbits {
                let start = orbit[0].norm();
                for (n, w) in orbit.iter().enumerate().skip(1) {
                    worst = worst.max(w.norm() / (c0.powi(n as i32) * start));
                }
            }
            let max_radius = probes.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let r0 = if worst > 0.0 {
                (R0_SAFETY / worst).min(max_radius)
            } else {
                max_radius
            };
            Ok(DecayConstants {
                r0,
                c0,
                source: ConstantSource::Fitted,
                regime: DecayRegime::Geometric,
            })
        }
        _ if doubles_exponent(&orbits) => Ok(DecayConstants {
            r0: 0.5,
            c0: 0.5,
            source: ConstantSource::Prescribed,
            regime: DecayRegime::Superattracting,
        }),
        _ => Err(Error::Rejected(
            "no geometric decay regime detected on the probe orbits".into(),
        )),
    }
}

/// Orbit until underflow (or the iteration cap), excluding the trailing zeros.
fn truncated_orbit(f: &FiniteBlaschkeProduct, z: Complex64) -> Result<Vec<Complex64>> {
    let mut out = vec![z];
    let mut w = z;
    for _ in 0..tolerances::MAX_ITERATIONS {
        w = step(f, w, false);
        if w.norm() == 0.0 {
            return Ok(out);
        }
        out.push(w);
    }
    Err(Error::NonTermination {
        limit: tolerances::MAX_ITERATIONS,
        context: format!("orbit of {z} did not reach the underflow floor"),
    })
}

/// Returns `(exp(mean slope), worst RMS residual)` or `None` when no probe has
/// at least three iterates in the fitting window.
fn fit_geometric(orbits: &[Vec<Complex64>], window: f64) -> Option<(f64, f64)> {
    let mut slopes = Vec::new();
    let mut worst_residual = 0.0f64;
    for orbit in orbits {
        let pts: Vec<(f64, f64)> = orbit
            .iter()
            .enumerate()
            .filter(|(_, w)| w.norm() <= window)
            .map(|(n, w)| (n as f64, w.norm().ln()))
            .collect();
        if pts.len() < 3 {
            continue;
        }
        let (slope, intercept) = least_squares(&pts);
        let rms = (pts
            .iter()
            .map(|(x, y)| (y - slope * x - intercept).powi(2))
            .sum::<f64>()
            / pts.len() as f64)
            .sqrt();
        worst_residual = worst_residual.max(rms);
        slopes.push(slope);
    }
    if slopes.is_empty() {
        return None;
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    Some((mean.exp(), worst_residual))
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `log|f^{n+1}| / log|f^n| >= 1.5` on every step taken inside the fitting window.
fn doubles_exponent(orbits: &[Vec<Complex64>]) -> bool {
    let mut seen = false;
    for orbit in orbits {
        for pair in orbit.windows(2) {
            let (a, b) = (pair[0].norm(), pair[1].norm());
            if a > FIT_CEILING || b == 0.0 {
                continue;
            }
            seen = true;
            if b.ln() / a.ln() < 1.5 {
                return false;
            }
        }
    }
    seen
}

/// Least `l >= 1` with `|f^l(z)| <= r0`.
pub fn hitting_time(f: &FiniteBlaschkeProduct, z: Complex64, r0: f64) -> Result<usize> {
    check_open_disc(z, "hitting time")?;
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r0 < 1 (got {r0})")));
    }
    let mut w = z;
    for l in 1..=tolerances::MAX_ITERATIONS {
        w = step(f, w, false);
        if w.norm() <= r0 {
            return Ok(l);
        }
    }
    Err(Error::NonTermination {
        limit: tolerances::MAX_ITERATIONS,
        context: format!("orbit of {z} never entered |w| <= {r0}"),
    })
}

/// `g_n(z) = f^n(z) / f'(0)^n`, the depth-`n` approximation of the Königs function.
///
/// Computed as a running product of `f(w)/(w f'(0))` so that neither `f^n(z)`
/// nor `f'(0)^n` has to be formed on its own (both underflow long before
/// their ratio does).
pub fn koenigs_approx(f: &FiniteBlaschkeProduct, z: Complex64, n: usize) -> Result<Complex64> {
    let lam = f.derivative_at_origin();
    if lam.norm() == 0.0 {
        return Err(Error::Rejected(
            "f'(0) = 0: superattracting fixed point, the Königs function is undefined".into(),
        ));
    }
    if z.norm() > 0.5 + tolerances::BOUNDARY {
        return Err(Error::Domain(format!("Königs approximation needs |z| <= 1/2 (got {z})")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    check_iterations(n)?;
    let mut w = z;
    let mut g = z;
    for _ in 0..n {
        let q = quotient_by_z(f, w);
        g *= q / lam;
        w *= q;
    }
    Ok(g)
}

/// `f(w) / w` for `f` with a simple zero at the origin (so the quotient is
/// analytic and equals `f'(0)` at `w = 0`).
fn quotient_by_z(f: &FiniteBlaschkeProduct, w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut num = f.rotation();
    let mut den = one;
    let mut skipped = false;
    for a in f.zeros() {
        if !skipped && a.re == 0.0 && a.im == 0.0 {
            skipped = true;
            continue;
        }
        num *= w - a;
        den *= one - a.conj() * w;
    }
    num / den
}
