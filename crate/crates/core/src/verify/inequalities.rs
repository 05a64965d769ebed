//! Inequalities, sampled; existential constants measured and tested for
//! stability under grid refinement.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::{Strict, random_in_annulus, random_in_disc, random_prefix, test_function, CheckContext, Outcome};
use crate::coefficients::{l2_mass, CoefficientSequence, SignModel};
use crate::dynamics::{self, estimate_decay_constants, distance_constant, schwarz_majorant};
use crate::error::Result;
use crate::grid::{BoundaryGrid, DiskGrid};
use crate::norms::{
    bloch_norm_estimate, bmo_norm_estimate, dirichlet_sandwich, sandwich_constants, mean_power,
    norm_l2_gram, poisson_variance_closed, toeplitz_symbol_bounds, NormOutput,
};
use crate::series;

fn default_functions() -> Vec<String> {
    vec!["f1".into(), "f2".into(), "f3".into()]
}

/// 256 points on `|z| = 1/2` and 256 uniform points of `|z| <= 1/2`.
pub(crate) fn standard_probes(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut probes: Vec<Complex64> = (0..256)
        .map(|k| Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / 256.0))
        .collect();
    probes.extend((0..256).map(|_| random_in_disc(rng, 0.5)));
    probes
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, Strict::smin)
}

fn relative_change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SandwichParams {
    pub function: String,
    pub prefixes: usize,
    pub length: usize,
}

impl Default for SandwichParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            prefixes: 100,
            length: 12,
        }
    }
}

/// `(1-|l|)/(1+|l|) sum |a_n|^2 <= ||F||_2^2 <= (1+|l|)/(1-|l|) sum |a_n|^2`, margins relative to the sum.
pub fn l2_sandwich(ctx: &CheckContext) -> Result<Outcome> {
    let p: SandwichParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let (lo, hi) = sandwich_constants(f.derivative_at_origin());
    let mut rng = ctx.rng();
    let mut worst = f64::INFINITY;
    for _ in 0..p.prefixes {
        let a = random_prefix(&mut rng, p.length);
        let sum = l2_mass(&a);
        let norm = norm_l2_gram(&a, f.derivative_at_origin())?;
        worst = worst.smin(((norm - lo * sum) / sum).smin((hi * sum - norm) / sum));
    }
    let mut out = Outcome::new();
    out.bound(lo)
        .measure("lower_constant", lo)
        .measure("upper_constant", hi)
        .measure("min_relative_margin", worst)
        .condition("sandwich", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampledParams {
    pub functions: Vec<String>,
    pub samples: usize,
    pub radius: f64,
    pub boundary_tolerance: f64,
}

impl Default for SampledParams {
    fn default() -> Self {
        Self {
            functions: default_functions(),
            samples: 100_000,
            radius: 0.5,
            boundary_tolerance: 1e-10,
        }
    }
}

/// `|f(z)| <= psi(|z|) <= |z|` on sampled points; `|f| = 1` on sampled boundary points.
pub fn schwarz_majorant_check(ctx: &CheckContext) -> Result<Outcome> {
    let p: SampledParams = ctx.params()?;
    let mut rng = ctx.rng();
    let points: Vec<Complex64> = (0..p.samples).map(|_| random_in_disc(&mut rng, 1.0)).collect();
    let boundary: Vec<Complex64> = (0..p.samples)
        .map(|_| {
            let z = random_in_disc(&mut rng, 1.0);
            z / z.norm()
        })
        .collect();
    let mut out = Outcome::new();
    let (mut majorant, mut schwarz, mut unimodular) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for name in &p.functions {
        let f = test_function(name)?;
        let margins: Vec<(f64, f64)> = points
            .par_iter()
            .map(|z| {
                let fz = f.eval_unchecked(*z).norm();
                let psi = schwarz_majorant(&f, z.norm())?;
                Ok((psi - fz, z.norm() - fz))
            })
            .collect::<Result<_>>()?;
        let m = min_of(margins.iter().map(|m| m.0));
        let s = min_of(margins.iter().map(|m| m.1));
        let u = boundary
            .iter()
            .map(|xi| (f.eval_unchecked(*xi).norm() - 1.0).abs())
            .fold(0.0, Strict::smax);
        out.measure(format!("majorant_margin[{name}]"), m)
            .measure(format!("schwarz_margin[{name}]"), s)
            .measure(format!("boundary_deviation[{name}]"), u);
        majorant = majorant.smin(m);
        schwarz = schwarz.smin(s);
        unimodular = unimodular.smax(u);
    }
    out.condition("majorant", majorant, ctx.tolerance)
        .condition("schwarz", schwarz, ctx.tolerance)
        .condition("boundary_unimodular", -unimodular, p.boundary_tolerance);
    Ok(out)
}

/// `1 - |z| <= c (1 - |f(z)|)` on `r <= |z| < 1` with `c = (1 + |f'(0)| r)/(1 + r)`.
pub fn distance_inequality(ctx: &CheckContext) -> Result<Outcome> {
    let p: SampledParams = ctx.params()?;
    let mut rng = ctx.rng();
    let points: Vec<Complex64> = (0..p.samples)
        .map(|_| random_in_annulus(&mut rng, p.radius, 1.0))
        .filter(|z| z.norm() < 1.0)
        .collect();
    let mut out = Outcome::new();
    let mut worst = f64::INFINITY;
    for name in &p.functions {
        let f = test_function(name)?;
        let c = distance_constant(&f, p.radius)?;
        let m = min_of(
            points
                .par_iter()
                .map(|z| c * (1.0 - f.eval_unchecked(*z).norm()) - (1.0 - z.norm()))
                .collect::<Vec<_>>(),
        );
        out.measure(format!("constant[{name}]"), c)
            .measure(format!("margin[{name}]"), m);
        worst = worst.smin(m);
    }
    out.condition("distance_inequality", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoublingParams {
    pub functions: Vec<String>,
    pub samples: usize,
    pub max_iterate: usize,
}

impl Default for DoublingParams {
    fn default() -> Self {
        Self {
            functions: vec!["f1".into(), "f4".into()],
            samples: 100_000,
            max_iterate: 10,
        }
    }
}

/// `|f^n(z)| <= |z|^{2^n}` when `f'(0) = 0`.
pub fn superattracting_doubling(ctx: &CheckContext) -> Result<Outcome> {
    let p: DoublingParams = ctx.params()?;
    let mut rng = ctx.rng();
    let points: Vec<Complex64> = (0..p.samples).map(|_| random_in_disc(&mut rng, 1.0)).collect();
    let mut out = Outcome::new();
    let mut worst = f64::INFINITY;
    for name in &p.functions {
        let f = test_function(name)?;
        if f.derivative_at_origin() != Complex64::new(0.0, 0.0) {
            out.note(format!("{name} skipped: f'(0) != 0"));
            continue;
        }
        let m = min_of(
            points
                .par_iter()
                .map(|z| {
                    let mut w = *z;
                    let mut best = f64::INFINITY;
                    for n in 1..=p.max_iterate {
                        w = dynamics::step(&f, w, false);
                        best = best.smin(z.norm().powi(1 << n) - w.norm());
                    }
                    best
                })
                .collect::<Vec<_>>(),
        );
        out.measure(format!("margin[{name}]"), m);
        worst = worst.smin(m);
    }
    out.condition("doubling", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayParams {
    pub functions: Vec<String>,
    pub holdout: usize,
    pub max_iterate: usize,
    /// `(name, expected c0, allowed deviation)` checked on the fit.
    pub expected_c0: Vec<(String, f64, f64)>,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            functions: default_functions(),
            holdout: 100_000,
            max_iterate: 60,
            expected_c0: vec![("f2".into(), 0.5, 0.05)],
        }
    }
}

/// Fitted `(r0, c0)` bound fresh orbits: `|f^n(z)| <= c0^n |z| / r0` for `|z| <= r0`.
pub fn geometric_decay(ctx: &CheckContext) -> Result<Outcome> {
    let p: DecayParams = ctx.params()?;
    let mut rng = ctx.rng();
    let mut out = Outcome::new();
    let mut worst = f64::INFINITY;
    for name in &p.functions {
        let f = test_function(name)?;
        let probes = standard_probes(&mut rng);
        let dc = estimate_decay_constants(&f, &probes)?;
        let holdout: Vec<Complex64> = (0..p.holdout).map(|_| random_in_disc(&mut rng, dc.r0)).collect();
        let m = min_of(
            holdout
                .par_iter()
                .map(|z| {
                    let mut w = *z;
                    let mut best = f64::INFINITY;
                    for n in 1..=p.max_iterate {
                        w = dynamics::step(&f, w, false);
                        best = best.smin(dc.bound(n, z.norm()) - w.norm());
                    }
                    best
                })
                .collect::<Vec<_>>(),
        );
        out.measure(format!("r0[{name}]"), dc.r0)
            .measure(format!("c0[{name}]"), dc.c0)
            .measure(format!("margin[{name}]"), m);
        out.note(format!("{name}: {:?} regime, {:?} constants", dc.regime, dc.source));
        worst = worst.smin(m);
        for (target, c0, allowed) in &p.expected_c0 {
            if target == name {
                out.condition(format!("c0_fit[{name}]"), allowed - (dc.c0 - c0).abs(), 0.0);
            }
        }
    }
    out.condition("holdout_bound", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaleyZygmundParams {
    pub function: String,
    pub truncations: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub grid_log2: u32,
}

impl Default for PaleyZygmundParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            truncations: vec![4, 16, 64],
            lambdas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            grid_log2: 16,
        }
    }
}

/// `m{Z > l E Z} >= (1 - l)^2 (E Z)^2 / E Z^2` for `Z = |F_N|^2` under the grid measure.
pub fn paley_zygmund(ctx: &CheckContext) -> Result<Outcome> {
    let p: PaleyZygmundParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let grid = BoundaryGrid::with_log2(p.grid_log2)?;
    let mut truncations = p.truncations.clone();
    truncations.sort_unstable();
    let n_max = truncations.last().copied().unwrap_or(0);
    let a = random_prefix(&mut ctx.rng(), n_max);
    let sums = series::boundary_sums(&f, &a, &grid, &truncations);
    let mut out = Outcome::new();
    let mut worst = f64::INFINITY;
    for (i, n) in truncations.iter().enumerate() {
        let values: Vec<Complex64> = sums.iter().map(|v| v[i]).collect();
        let mean = mean_power(&values, 2.0);
        let second = mean_power(&values, 4.0);
        let mut curve = Vec::new();
        for l in &p.lambdas {
            let threshold = l * mean;
            let hits = values.iter().filter(|v| v.norm_sqr() > threshold).count();
            let measure = hits as f64 / values.len() as f64;
            let bound = (1.0 - l).powi(2) * mean * mean / second;
            worst = worst.smin(measure - bound);
            curve.push([*l, measure - bound]);
        }
        out.series(format!("margin_by_lambda[N={n}]"), curve);
    }
    out.measure("min_margin", worst)
        .condition("paley_zygmund", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockParams {
    pub function: String,
    pub blocks: Vec<(usize, usize)>,
    pub epsilons: Vec<f64>,
    pub gate_epsilon: f64,
    pub probes: usize,
    pub draws: usize,
}

impl Default for BlockParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            blocks: vec![(5, 15), (10, 30)],
            epsilons: vec![0.3, 0.1, 0.03, 0.01],
            gate_epsilon: 0.01,
            probes: 20_000,
            draws: 4,
        }
    }
}

/// Block variance `>= (1/2) (1-|l|)/(1+|l|) sum_{n=M}^N |a_n|^2` once `|f^M(z)| <= eps`.
pub fn block_lower_bound(ctx: &CheckContext) -> Result<Outcome> {
    let p: BlockParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let lam = f.derivative_at_origin().norm();
    let constant = 0.5 * (1.0 - lam) / (1.0 + lam);
    let mut rng = ctx.rng();
    let probes: Vec<Complex64> = (0..p.probes).map(|_| random_in_disc(&mut rng, 1.0)).collect();
    let mut epsilons = p.epsilons.clone();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    if !epsilons.contains(&p.gate_epsilon) {
        epsilons.push(p.gate_epsilon);
    }
    // min margin per epsilon over all blocks, draws and qualifying probes
    let mut per_eps = vec![f64::INFINITY; epsilons.len()];
    let mut counts = vec![0usize; epsilons.len()];
    for (first, last) in &p.blocks {
        for _ in 0..p.draws {
            let block = random_prefix(&mut rng, last - first + 1);
            let sum = l2_mass(&block);
            let rows: Vec<(f64, f64)> = probes
                .par_iter()
                .map(|z| {
                    let w = dynamics::iterate(&f, *first, *z)?.norm();
                    let v = poisson_variance_closed(&f, &block, *first, *z)?;
                    Ok((w, (v - constant * sum) / sum))
                })
                .collect::<Result<_>>()?;
            for (k, eps) in epsilons.iter().enumerate() {
                for (w, m) in &rows {
                    if w <= eps {
                        per_eps[k] = per_eps[k].smin(*m);
                        counts[k] += 1;
                    }
                }
            }
        }
    }
    let mut out = Outcome::new();
    out.bound(constant).measure("constant", constant);
    let mut threshold = 0.0f64;
    for (k, eps) in epsilons.iter().enumerate() {
        out.measure(format!("min_relative_margin[eps={eps}]"), per_eps[k])
            .measure(format!("probe_count[eps={eps}]"), counts[k] as f64);
        if counts[k] > 0 && per_eps[k] >= -ctx.tolerance {
            threshold = threshold.smax(*eps);
        }
    }
    out.measure("empirical_epsilon", threshold);
    out.series(
        "min_margin_by_epsilon",
        epsilons.iter().zip(&per_eps).map(|(e, m)| [*e, *m]).collect(),
    );
    let gate = epsilons.iter().position(|e| *e == p.gate_epsilon).unwrap_or(0);
    if counts[gate] == 0 {
        out.note(format!("no probe satisfied |f^M(z)| <= {}", p.gate_epsilon));
        out.condition("gate", f64::NEG_INFINITY, ctx.tolerance);
    } else {
        out.condition("gate", per_eps[gate], ctx.tolerance);
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantParams {
    pub function: String,
    pub coefficients: CoefficientSequence,
    pub length: usize,
    pub disk_grid: DiskGrid,
    pub stability: f64,
}

impl Default for ConstantParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 0.75,
                signs: SignModel::Rademacher,
                seed: 1,
            },
            length: 40,
            disk_grid: DiskGrid {
                j_min: 1.0,
                j_max: 9.0,
                j_step: 1.0,
                angles: 64,
            },
            stability: 0.25,
        }
    }
}

/// Measured constant of `variance <= C sum |a_n|^2 (1 - |f^n(z)|^2)` and its stability under grid doubling.
pub fn variance_constant(ctx: &CheckContext) -> Result<Outcome> {
    let p: ConstantParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let a = p.coefficients.prefix(p.length);
    let coarse = bmo_norm_estimate(&f, &a, &p.disk_grid)?;
    let fine = bmo_norm_estimate(&f, &a, &p.disk_grid.doubled())?;
    let change = relative_change(coarse.measured_constant, fine.measured_constant);
    let sup_change = relative_change(coarse.lower_bound, fine.lower_bound);
    let mut out = Outcome::new();
    out.bound(p.stability)
        .measure("constant", coarse.measured_constant)
        .measure("constant_doubled", fine.measured_constant)
        .measure("relative_change", change)
        .measure("bmo_lower_bound", coarse.lower_bound)
        .measure("bmo_lower_bound_doubled", fine.lower_bound)
        .measure("bmo_relative_change", sup_change)
        .measure("sandwich_constant", coarse.sandwich_constant)
        .measure("sum_sq", coarse.sum_sq);
    out.norms.push(
        NormOutput::new("bmoa_squared", coarse.lower_bound)
            .with_bounds(Some(coarse.lower_bound), Some(coarse.upper_bound))
            .with_error((fine.lower_bound - coarse.lower_bound).abs()),
    );
    let radii = p.disk_grid.radii();
    let per_radius: Vec<[f64; 2]> = radii
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let start = 1 + i * p.disk_grid.angles;
            let m = coarse.samples[start..start + p.disk_grid.angles]
                .iter()
                .map(|s| s.ratio)
                .fold(0.0, Strict::smax);
            [-(1.0 - r).log2(), m]
        })
        .collect();
    out.series("max_ratio_by_j", per_radius);
    let finite = coarse.measured_constant.is_finite() && fine.measured_constant.is_finite();
    out.condition("finite", if finite { 0.0 } else { f64::NEG_INFINITY }, 0.0)
        .condition("stability", p.stability - change, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HpParams {
    pub function: String,
    pub exponents: Vec<f64>,
    pub prefixes: usize,
    pub length: usize,
    pub grid_log2: u32,
    pub stability: f64,
}

impl Default for HpParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            exponents: vec![1.0, 4.0],
            prefixes: 20,
            length: 12,
            grid_log2: 14,
            stability: 0.25,
        }
    }
}

/// Measured `C(p, f)` with `C^{-1} ||a||_2 <= ||F||_p <= C ||a||_2`, stable under grid doubling.
pub fn hp_constant(ctx: &CheckContext) -> Result<Outcome> {
    let p: HpParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let coarse = BoundaryGrid::with_log2(p.grid_log2)?;
    let fine = BoundaryGrid::with_log2(p.grid_log2 + 1)?;
    let mut rng = ctx.rng();
    let prefixes: Vec<Vec<Complex64>> = (0..p.prefixes).map(|_| random_prefix(&mut rng, p.length)).collect();
    let fields: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = prefixes
        .iter()
        .map(|a| {
            (
                l2_mass(a).sqrt(),
                series::boundary_field(&f, a, &coarse),
                series::boundary_field(&f, a, &fine),
            )
        })
        .collect();
    let mut out = Outcome::new();
    let mut worst = f64::INFINITY;
    for exponent in &p.exponents {
        let constant = |which: usize| {
            fields
                .iter()
                .map(|(norm, c, fi)| {
                    let values = if which == 0 { c } else { fi };
                    let ratio = mean_power(values, *exponent).powf(1.0 / exponent) / norm;
                    ratio.smax(1.0 / ratio)
                })
                .fold(0.0, Strict::smax)
        };
        let (c1, c2) = (constant(0), constant(1));
        let change = relative_change(c1, c2);
        out.measure(format!("constant[p={exponent}]"), c1)
            .measure(format!("constant_doubled[p={exponent}]"), c2)
            .measure(format!("relative_change[p={exponent}]"), change);
        worst = worst.smin(p.stability - change);
    }
    out.bound(p.stability).condition("stability", worst, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolSandwichParams {
    pub functions: Vec<String>,
    pub prefixes: usize,
    pub length: usize,
}

impl Default for SymbolSandwichParams {
    fn default() -> Self {
        Self {
            functions: default_functions(),
            prefixes: 100,
            length: 10,
        }
    }
}

/// `C(f,N)^{-1} sum |a_n|^2 N^n <= D(F) <= C(f,N) sum |a_n|^2 N^n`, margins relative to the weighted sum.
pub fn dirichlet_symbol_sandwich(ctx: &CheckContext) -> Result<Outcome> {
    let p: SymbolSandwichParams = ctx.params()?;
    let mut rng = ctx.rng();
    let mut out = Outcome::new();
    let (mut worst, mut product) = (f64::INFINITY, 0.0f64);
    for name in &p.functions {
        let f = test_function(name)?;
        let bounds = toeplitz_symbol_bounds(f.derivative_at_origin(), f.degree())?;
        let mut m = f64::INFINITY;
        for _ in 0..p.prefixes {
            let a = random_prefix(&mut rng, p.length);
            let s = dirichlet_sandwich(&f, &a)?;
            m = m.smin(s.margin() / s.weighted_sum);
        }
        out.measure(format!("cf_n[{name}]"), bounds.cf_n)
            .measure(format!("min_relative_margin[{name}]"), m);
        worst = worst.smin(m);
        product = product.smax((bounds.t_min * bounds.t_max - 1.0).abs());
    }
    out.condition("sandwich", worst, ctx.tolerance)
        .condition("symbol_product", -product, ctx.tolerance);
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlochParams {
    pub function: String,
    pub coefficients: CoefficientSequence,
    pub length: usize,
    pub disk_grid: DiskGrid,
    pub stability: f64,
}

impl Default for BlochParams {
    fn default() -> Self {
        Self {
            function: "f2".into(),
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 0.0,
                signs: SignModel::Plus,
                seed: 0,
            },
            length: 30,
            disk_grid: DiskGrid {
                j_min: 1.0,
                j_max: 9.0,
                j_step: 1.0,
                angles: 64,
            },
            stability: 0.25,
        }
    }
}

/// Measured `C` in `||F||_B <= C sup |a_n|` and its stability under grid doubling.
pub fn bloch_constant(ctx: &CheckContext) -> Result<Outcome> {
    let p: BlochParams = ctx.params()?;
    let f = test_function(&p.function)?;
    let a = p.coefficients.prefix(p.length);
    let sup = p.coefficients.sup_modulus();
    let probes = standard_probes(&mut ctx.rng());
    let decay = estimate_decay_constants(&f, &probes)?;
    let coarse = bloch_norm_estimate(&f, &a, &p.disk_grid, &decay, sup)?;
    let fine = bloch_norm_estimate(&f, &a, &p.disk_grid.doubled(), &decay, sup)?;
    let (c1, c2) = (coarse.value / sup, fine.value / sup);
    let change = relative_change(c1, c2);
    let mut out = Outcome::new();
    out.bound(p.stability)
        .measure("constant", c1)
        .measure("constant_doubled", c2)
        .measure("relative_change", change)
        .measure("sup_coefficient", sup)
        .measure(
            "truncation_error",
            coarse.truncation_error.unwrap_or(f64::INFINITY),
        );
    let mut bloch = NormOutput::new("bloch", coarse.value).with_bounds(Some(coarse.value), None);
    if let Some(t) = coarse.truncation_error {
        bloch = bloch.with_bounds(Some(coarse.value), Some(coarse.value + t)).with_error(t);
    }
    out.norms.push(bloch);
    out.condition("stability", p.stability - change, ctx.tolerance);
    Ok(out)
}
