//! Convergence, unboundedness and VMOA experiments.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use super::{Strict, test_function, CheckContext, Outcome};
use crate::coefficients::{l2_mass, CoefficientSequence, SignModel};
use crate::disc::Arc;
use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, DiskGrid};
use crate::norms::{sandwich_constants, mean_power, norm_l2_gram, poisson_variance_closed, NormOutput};
use crate::series;
use crate::tolerances::relative_error;

/// Square-summable regime: the block `F_{2N} - F_N` is measured by
/// quadrature and compared with the Gram form of `a_{N+1}, ..., a_{2N}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummableRegime {
    pub coefficients: CoefficientSequence,
    pub truncation: usize,
    /// Smaller truncation whose block must exceed the one at `truncation` by `min_ratio`.
    pub reference_truncation: usize,
    pub min_ratio: f64,
    pub grid_log2: u32,
}

impl Default for SummableRegime {
    fn default() -> Self {
        Self {
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 0.75,
                signs: SignModel::Plus,
                seed: 0,
            },
            truncation: 1 << 12,
            reference_truncation: 1 << 10,
            min_ratio: 2.0,
            grid_log2: 20,
        }
    }
}

/// Divergent regime: `s_N^2 = ||F_N||_2^2` against the Gram sandwich bracket
/// of `sum |a_n|^2` and the Paley-Zygmund floor on `m{|F_N| > s_N / 2}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DivergentRegime {
    pub coefficients: CoefficientSequence,
    pub truncations: Vec<usize>,
    /// Relative widening of the bracket.
    pub bracket_slack: f64,
    pub grid_log2: u32,
}

impl Default for DivergentRegime {
    fn default() -> Self {
        Self {
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 0.5,
                signs: SignModel::Plus,
                seed: 0,
            },
            truncations: vec![1 << 8, 1 << 10],
            bracket_slack: 0.05,
            grid_log2: 16,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceParams {
    pub function: String,
    pub summable: Option<SummableRegime>,
    pub divergent: Option<DivergentRegime>,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            summable: Some(SummableRegime::default()),
            divergent: Some(DivergentRegime::default()),
        }
    }
}

pub fn convergence_experiment(ctx: &CheckContext) -> Result<Outcome> {
    let p: ConvergenceParams = ctx.params()?;
    let (Some(summable), Some(divergent)) = (&p.summable, &p.divergent) else {
        return Err(Error::Config(vec![format!(
            "check_params.{}: both the summable and the divergent regime are required",
            ctx.check_id
        )]));
    };
    let f = test_function(&p.function)?;
    let mut out = Outcome::new();
    summable_regime(&f, summable, ctx.tolerance, &mut out)?;
    divergent_regime(&f, divergent, &mut out)?;
    Ok(out)
}

fn summable_regime(
    f: &crate::FiniteBlaschkeProduct,
    p: &SummableRegime,
    tolerance: f64,
    out: &mut Outcome,
) -> Result<()> {
    if !p.coefficients.is_l2_summable() {
        return Err(Error::Config(vec![
            "convergence: the summable regime needs square-summable coefficients".into(),
        ]));
    }
    let (n, n_ref) = (p.truncation, p.reference_truncation);
    if n_ref == 0 || n_ref >= n {
        return Err(Error::Config(vec![
            "convergence: need 0 < reference_truncation < truncation".into(),
        ]));
    }
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let a = p.coefficients.prefix(2 * n);
    let mut checkpoints = vec![n_ref, 2 * n_ref, n, 2 * n];
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let sums = series::boundary_sums(f, &a, &grid, &checkpoints);
    let slot = |c: usize| checkpoints.iter().position(|x| *x == c).unwrap();
    let block_mean = |lo: usize| {
        let (i, j) = (slot(lo), slot(2 * lo));
        let values: Vec<Complex64> = sums.iter().map(|v| v[j] - v[i]).collect();
        mean_power(&values, 2.0)
    };
    let quadrature = block_mean(n);
    let reference = block_mean(n_ref);
    let gram = norm_l2_gram(&a[n..2 * n], f.derivative_at_origin())?;
    let err = relative_error(quadrature, gram);
    let ratio = reference / quadrature;
    out.measure("summable.block_quadrature", quadrature)
        .measure("summable.block_gram", gram)
        .measure("summable.relative_error", err)
        .measure("summable.block_reference", reference)
        .measure("summable.decrease_ratio", ratio)
        .measure("summable.tail_l2", p.coefficients.l2_tail(n)?)
        .bound(tolerance);
    out.condition("block_identity", tolerance - err, tolerance)
        .condition("block_decrease", ratio - p.min_ratio, 0.0);
    Ok(())
}

fn divergent_regime(
    f: &crate::FiniteBlaschkeProduct,
    p: &DivergentRegime,
    out: &mut Outcome,
) -> Result<()> {
    if p.truncations.len() < 2 {
        return Err(Error::Config(vec![
            "convergence: the divergent regime needs at least two truncations".into(),
        ]));
    }
    let mut truncations = p.truncations.clone();
    truncations.sort_unstable();
    truncations.dedup();
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let a = p.coefficients.prefix(*truncations.last().unwrap());
    let sums = series::boundary_sums(f, &a, &grid, &truncations);
    let (lo, hi) = sandwich_constants(f.derivative_at_origin());
    let (mut bracket, mut floor_min, mut pz) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut growth = Vec::new();
    for (i, n) in truncations.iter().enumerate() {
        let values: Vec<Complex64> = sums.iter().map(|v| v[i]).collect();
        let s2 = mean_power(&values, 2.0);
        let fourth = mean_power(&values, 4.0);
        let mass = l2_mass(&a[..*n]);
        let (lower, upper) = (lo * mass * (1.0 - p.bracket_slack), hi * mass * (1.0 + p.bracket_slack));
        bracket = bracket.smin(((s2 - lower) / mass).smin((upper - s2) / mass));
        let floor = 0.25 * s2 * s2 / fourth;
        let measure = values.iter().filter(|v| v.norm_sqr() > 0.25 * s2).count() as f64
            / values.len() as f64;
        floor_min = floor_min.smin(floor);
        pz = pz.smin(measure - floor);
        growth.push([*n as f64, s2.sqrt()]);
        out.measure(format!("divergent.s_squared[N={n}]"), s2)
            .measure(format!("divergent.sum_sq[N={n}]"), mass)
            .measure(format!("divergent.pz_floor[N={n}]"), floor)
            .measure(format!("divergent.pz_measure[N={n}]"), measure);
    }
    let rise = growth.windows(2).map(|w| w[1][1] - w[0][1]).fold(f64::INFINITY, Strict::smin);
    out.series("divergent.s_by_truncation", growth);
    out.condition("bracket", bracket, 0.0)
        .condition(
            "pz_floor_positive",
            if floor_min > 0.0 { floor_min } else { f64::NEG_INFINITY },
            0.0,
        )
        .condition("pz_measure", pz, 1e-12)
        .condition(
            "growth",
            if rise > 0.0 { rise } else { f64::NEG_INFINITY },
            0.0,
        );
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnboundednessParams {
    pub function: String,
    pub coefficients: CoefficientSequence,
    pub arc: Arc,
    pub grid_log2: Vec<u32>,
    /// `N = M / truncation_divisor` on each grid of size `M`.
    pub truncation_divisor: usize,
    /// Subarc whose sup must not exceed the sup over `arc` (sanity check).
    pub subarc: Option<Arc>,
}

impl Default for UnboundednessParams {
    fn default() -> Self {
        Self {
            function: "f1".into(),
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 1.0,
                signs: SignModel::Plus,
                seed: 0,
            },
            arc: Arc::full_circle(),
            grid_log2: vec![12, 16, 20],
            truncation_divisor: 4,
            subarc: Some(Arc {
                center_angle: std::f64::consts::FRAC_PI_2,
                length: 0.25,
            }),
        }
    }
}

/// Growth signature of `sup_I |F_N|` along a grid ladder: strict increase is
/// what essential unboundedness predicts, but it is evidence, not proof.
pub fn unboundedness_experiment(ctx: &CheckContext) -> Result<Outcome> {
    let p: UnboundednessParams = ctx.params()?;
    p.coefficients.validate()?;
    if p.coefficients.is_l1_summable() {
        return Err(Error::Rejected(
            "coefficients are absolutely summable, so F is bounded by sum |a_n|".into(),
        ));
    }
    if p.grid_log2.len() < 2 || p.truncation_divisor == 0 {
        return Err(Error::Config(vec![
            "unboundedness: need at least two grids and a positive truncation divisor".into(),
        ]));
    }
    let f = test_function(&p.function)?;
    let mut out = Outcome::new();
    let mut ladder = Vec::new();
    let mut sub_margin = f64::INFINITY;
    for log2 in &p.grid_log2 {
        let grid = BoundaryGrid::with_log2(*log2)?;
        let n = (grid.size / p.truncation_divisor).max(1);
        let a = p.coefficients.prefix(n);
        let field = series::boundary_field(&f, &a, &grid);
        let sup_over = |arc: &Arc| {
            field
                .par_iter()
                .enumerate()
                .filter(|(j, _)| arc.contains_angle(grid.angle(*j)))
                .map(|(_, v)| v.norm())
                .reduce(|| 0.0, Strict::smax)
        };
        let sup = sup_over(&p.arc);
        if let Some(sub) = &p.subarc {
            sub_margin = sub_margin.smin(sup - sup_over(sub));
        }
        out.measure(format!("sup[M=2^{log2}]"), sup)
            .measure(format!("truncation[M=2^{log2}]"), n as f64);
        ladder.push([*log2 as f64, sup]);
    }
    let rise = ladder.windows(2).map(|w| w[1][1] - w[0][1]).fold(f64::INFINITY, Strict::smin);
    out.series("sup_by_grid_log2", ladder);
    out.note("growth signature of essential unboundedness; not a proof");
    out.condition(
        "strict_growth",
        if rise > 0.0 { rise } else { f64::NEG_INFINITY },
        0.0,
    );
    if p.subarc.is_some() {
        out.condition("subarc_monotone", sub_margin, 0.0);
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VmoaParams {
    pub function: String,
    pub coefficients: CoefficientSequence,
    pub length: usize,
    pub disk_grid: DiskGrid,
    pub allowed_exceptions: usize,
    /// Final max variance must be at most this fraction of `sum |a_n|^2`.
    pub final_fraction: f64,
}

impl Default for VmoaParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            coefficients: CoefficientSequence::real(
                &(1..=60).map(|n| (-(n as f64)).exp2()).collect::<Vec<_>>(),
            ),
            length: 60,
            disk_grid: DiskGrid {
                j_min: 6.0,
                j_max: 14.0,
                j_step: 1.0,
                angles: 64,
            },
            allowed_exceptions: 1,
            final_fraction: 0.05,
        }
    }
}

/// Max Poisson variance over the angles of each radius `1 - 2^{-j}`.
pub fn vmoa_decay_experiment(ctx: &CheckContext) -> Result<Outcome> {
    let p: VmoaParams = ctx.params()?;
    p.disk_grid.validate()?;
    if !p.coefficients.is_l2_summable() {
        return Err(Error::Config(vec![
            "vmoa_decay: coefficients must be square summable".into(),
        ]));
    }
    let f = test_function(&p.function)?;
    let a = p.coefficients.prefix(p.length);
    let mass = l2_mass(&a);
    let points = p.disk_grid.points();
    let variances: Vec<f64> = points
        .par_iter()
        .map(|z| poisson_variance_closed(&f, &a, 1, *z))
        .collect::<Result<_>>()?;
    let ladder = p.disk_grid.ladder();
    let maxima: Vec<[f64; 2]> = ladder
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let row = &variances[i * p.disk_grid.angles..(i + 1) * p.disk_grid.angles];
            [*j, row.iter().copied().fold(0.0, Strict::smax)]
        })
        .collect();
    let exceptions = maxima.windows(2).filter(|w| w[1][1] >= w[0][1]).count();
    let last = maxima.last().map(|m| m[1]).unwrap_or(0.0);
    let first = maxima.first().map(|m| m[1]).unwrap_or(0.0);
    let mut out = Outcome::new();
    out.bound(p.final_fraction * mass)
        .measure("sum_sq", mass)
        .measure("max_variance_first", first)
        .measure("max_variance_last", last)
        .measure("non_monotone_steps", exceptions as f64);
    out.norms.push(NormOutput::new("vmoa_tail_variance", last));
    out.series("max_variance_by_j", maxima);
    let final_margin = if mass > 0.0 {
        (p.final_fraction * mass - last) / mass
    } else {
        0.0
    };
    out.condition(
        "decreasing",
        p.allowed_exceptions as f64 - exceptions as f64,
        0.0,
    )
    .condition("final_small", final_margin, ctx.tolerance);
    Ok(out)
}
