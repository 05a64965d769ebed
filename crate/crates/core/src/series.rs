//! Streaming evaluation of partial sums `F_N = sum_{n <= N} a_n f^n` on grids.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{check_closed_disc, FiniteBlaschkeProduct};
use crate::coefficients::CoefficientSequence;
use crate::dynamics::{self, DecayConstants};
use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, Grid};

/// Snapshot of `F_n` at every point of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldOfValues {
    pub grid: Grid,
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl FieldOfValues {
    /// `angle,re,im` rows (boundary) or `radius,angle,re,im` rows (disk)
    /// with a header, LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let disk = matches!(self.grid, Grid::Disk(_));
        writeln!(out, "{}", if disk { "radius,angle,re,im" } else { "angle,re,im" })?;
        for (z, v) in self.grid.points().iter().zip(&self.values) {
            if disk {
                writeln!(out, "{},{},{},{}", z.norm(), z.arg(), v.re, v.im)?;
            } else {
                writeln!(out, "{},{},{}", z.arg(), v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Little-endian f64 records without a header: `(angle, re, im)` on a
    /// boundary grid, `(radius, angle, re, im)` on a disk grid.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let disk = matches!(self.grid, Grid::Disk(_));
        for (z, v) in self.grid.points().iter().zip(&self.values) {
            if disk {
                out.write_all(&z.norm().to_le_bytes())?;
            }
            for x in [z.arg(), v.re, v.im] {
                out.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Evaluates `F_c` at every checkpoint `c` over `grid`, one live iterate per point.
pub fn synthesize_partial_sums(
    f: &FiniteBlaschkeProduct,
    a: &CoefficientSequence,
    grid: &Grid,
    n: usize,
    checkpoints: &[usize],
) -> Result<Vec<FieldOfValues>> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation N must be positive".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be sorted".into()));
    }
    if let Some(c) = checkpoints.iter().find(|c| **c > n) {
        return Err(Error::InvalidArgument(format!("checkpoint {c} exceeds N = {n}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("grid is empty".into()));
    }
    if let Grid::Disk(g) = grid {
        g.validate()?;
    }
    let coeffs = a.prefix(n);
    let per_point = match grid {
        Grid::Boundary(g) => boundary_sums(f, &coeffs, g, checkpoints),
        Grid::Disk(_) => {
            let points = grid.points();
            for z in &points {
                check_closed_disc(*z)?;
            }
            let kernel = Kernel::new(&coeffs, checkpoints);
            points
                .par_iter()
                .map(|z| kernel.float_orbit(f, *z))
                .collect::<Vec<_>>()
        }
    };
    Ok(transpose(grid, checkpoints, per_point))
}

/// Partial sums at the points of a boundary grid, indexed `[point][checkpoint]`.
pub fn boundary_sums(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    grid: &BoundaryGrid,
    checkpoints: &[usize],
) -> Vec<Vec<Complex64>> {
    let kernel = Kernel::new(coeffs, checkpoints);
    if f.is_monomial() && f.rotation() == Complex64::new(1.0, 0.0) {
        let table = grid.points();
        let degree = f.degree() as u64;
        (0..grid.size)
            .into_par_iter()
            .map(|j| kernel.phase_orbit(&table, degree, j as u64))
            .collect()
    } else {
        let table = grid.points();
        table
            .par_chunks(LANES)
            .flat_map_iter(|chunk| kernel.float_orbits(f, chunk))
            .collect()
    }
}

/// `F_N` on a boundary grid for the coefficient prefix `coeffs` (so `N = coeffs.len()`).
pub fn boundary_field(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    grid: &BoundaryGrid,
) -> Vec<Complex64> {
    boundary_sums(f, coeffs, grid, &[coeffs.len()])
        .into_iter()
        .map(|v| v[0])
        .collect()
}

/// Partial sums at arbitrary points of the closed disc.
pub fn partial_sums_at(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    points: &[Complex64],
    checkpoints: &[usize],
) -> Result<Vec<Vec<Complex64>>> {
    for z in points {
        check_closed_disc(*z)?;
    }
    let kernel = Kernel::new(coeffs, checkpoints);
    Ok(points.par_iter().map(|z| kernel.float_orbit(f, *z)).collect())
}

fn transpose(grid: &Grid, checkpoints: &[usize], per_point: Vec<Vec<Complex64>>) -> Vec<FieldOfValues> {
    checkpoints
        .iter()
        .enumerate()
        .map(|(i, c)| FieldOfValues {
            grid: *grid,
            n: *c,
            values: per_point.iter().map(|v| v[i]).collect(),
        })
        .collect()
}

const LANES: usize = 8;

struct Kernel<'a> {
    coeffs: &'a [Complex64],
    checkpoints: &'a [usize],
    /// `cumulative[n] = a_1 + ... + a_n`.
    cumulative: Vec<Complex64>,
}

impl<'a> Kernel<'a> {
    fn new(coeffs: &'a [Complex64], checkpoints: &'a [usize]) -> Self {
        let mut cumulative = Vec::with_capacity(coeffs.len() + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        cumulative.push(acc);
        for a in coeffs {
            acc += a;
            cumulative.push(acc);
        }
        Self {
            coeffs,
            checkpoints,
            cumulative,
        }
    }

    fn horizon(&self) -> usize {
        self.checkpoints.last().copied().unwrap_or(0)
    }

    /// Records every checkpoint once the orbit is frozen at `w` from step `n`
    /// on: `F_c = F_n + w (A_c - A_n)`.
    fn finish_frozen(&self, out: &mut Vec<Complex64>, sum: Complex64, w: Complex64, n: usize) {
        while out.len() < self.checkpoints.len() {
            let c = self.checkpoints[out.len()];
            out.push(sum + w * (self.cumulative[c] - self.cumulative[n]));
        }
    }

    fn record(&self, out: &mut Vec<Complex64>, sum: Complex64, n: usize) {
        while out.len() < self.checkpoints.len() && self.checkpoints[out.len()] == n {
            out.push(sum);
        }
    }

    /// Generic orbit in floating point; boundary orbits are renormalized to the circle.
    fn float_orbit(&self, f: &FiniteBlaschkeProduct, z: Complex64) -> Vec<Complex64> {
        let on_circle = dynamics::is_on_circle(z);
        let mut out = Vec::with_capacity(self.checkpoints.len());
        let mut sum = Complex64::new(0.0, 0.0);
        let mut w = z;
        self.record(&mut out, sum, 0);
        for n in 1..=self.horizon() {
            let next = dynamics::step(f, w, on_circle);
            if next == w || next.norm_sqr() == 0.0 {
                self.finish_frozen(&mut out, sum, next, n - 1);
                return out;
            }
            w = next;
            sum += self.coeffs[n - 1] * w;
            self.record(&mut out, sum, n);
        }
        out
    }

    /// `float_orbit` for up to `LANES` points advanced in lockstep, which
    /// hides the latency of the serial recurrence. Lanes that froze keep
    /// being stepped (a fixed point maps to itself) but no longer recorded.
    fn float_orbits(&self, f: &FiniteBlaschkeProduct, points: &[Complex64]) -> Vec<Vec<Complex64>> {
        let k = points.len();
        let zero = Complex64::new(0.0, 0.0);
        let circle = points.iter().all(|z| dynamics::is_on_circle(*z));
        let mut w = [zero; LANES];
        let mut sum = [zero; LANES];
        let mut live = [false; LANES];
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(k);
        for (i, z) in points.iter().enumerate() {
            w[i] = *z;
            live[i] = true;
            let mut o = Vec::with_capacity(self.checkpoints.len());
            self.record(&mut o, zero, 0);
            out.push(o);
        }
        let mut remaining = k;
        let mut next_checkpoint = 0;
        while next_checkpoint < self.checkpoints.len() && self.checkpoints[next_checkpoint] == 0 {
            next_checkpoint += 1;
        }
        for n in 1..=self.horizon() {
            if remaining == 0 {
                break;
            }
            let a = self.coeffs[n - 1];
            let mut next = w;
            if circle {
                f.eval_on_circle_batch(&mut next);
            } else {
                for i in 0..k {
                    next[i] = dynamics::step(f, w[i], dynamics::is_on_circle(points[i]));
                }
            }
            let mut hit = false;
            for i in 0..k {
                hit |= next[i] == w[i] || next[i].norm_sqr() == 0.0;
            }
            if hit {
                for i in 0..k {
                    if live[i] && (next[i] == w[i] || next[i].norm_sqr() == 0.0) {
                        self.finish_frozen(&mut out[i], sum[i], next[i], n - 1);
                        live[i] = false;
                        remaining -= 1;
                    }
                }
            }
            for i in 0..k {
                w[i] = next[i];
                sum[i] += a * next[i];
            }
            if next_checkpoint < self.checkpoints.len() && self.checkpoints[next_checkpoint] == n {
                for i in 0..k {
                    if live[i] {
                        self.record(&mut out[i], sum[i], n);
                    }
                }
                while next_checkpoint < self.checkpoints.len() && self.checkpoints[next_checkpoint] == n {
                    next_checkpoint += 1;
                }
            }
        }
        out
    }

    /// Exact orbit of `xi_j` under `z^d`: `f^n(xi_j) = xi_{j d^n mod M}`.
    fn phase_orbit(&self, table: &[Complex64], degree: u64, start: u64) -> Vec<Complex64> {
        let modulus = table.len() as u64;
        let mut out = Vec::with_capacity(self.checkpoints.len());
        let mut sum = Complex64::new(0.0, 0.0);
        let mut p = start;
        self.record(&mut out, sum, 0);
        for n in 1..=self.horizon() {
            let next = (p * degree) % modulus;
            if next == p {
                self.finish_frozen(&mut out, sum, table[p as usize], n - 1);
                return out;
            }
            p = next;
            sum += self.coeffs[n - 1] * table[p as usize];
            self.record(&mut out, sum, n);
        }
        out
    }
}

/// `sum_{n <= N} a_n f^n(z)` with every iterate recomputed from `z`.
pub fn evaluate_direct(
    f: &FiniteBlaschkeProduct,
    coeffs: &[Complex64],
    z: Complex64,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, a) in coeffs.iter().enumerate() {
        sum += a * dynamics::iterate(f, k + 1, z)?;
    }
    Ok(sum)
}

/// `(1 - c0^2)^{-1/2} (sum_{n > N} |a_n|^2)^{1/2}`, a bound for
/// `sum_{n > N} |a_n| |f^n(z)|` whenever `|f^N(z)| <= r0`.
pub fn tail_bound(a: &CoefficientSequence, n: usize, decay: &DecayConstants) -> Result<f64> {
    let tail = a.l2_tail(n)?;
    Ok((tail / (1.0 - decay.c0 * decay.c0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::named_test_function;
    use crate::grid::DiskGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_term_is_f() {
        let f = named_test_function("f2").unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(64).unwrap());
        let a = CoefficientSequence::real(&[1.0]);
        let out = synthesize_partial_sums(&f, &a, &grid, 1, &[1]).unwrap();
        for (z, v) in grid.points().iter().zip(&out[0].values) {
            assert!((f.eval(*z).unwrap() - v).norm() < 1e-15);
        }
    }

    #[test]
    fn monomial_at_one() {
        let f = named_test_function("f1").unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(8).unwrap());
        let a = CoefficientSequence::real(&[1.0, 1.0]);
        let out = synthesize_partial_sums(&f, &a, &grid, 2, &[2]).unwrap();
        assert_eq!(out[0].values[0], c(2.0, 0.0));
    }

    #[test]
    fn checkpoints_match_direct_evaluation() {
        let a = CoefficientSequence::power_law(1.0, 0.6, crate::coefficients::SignModel::Rademacher, 11)
            .unwrap();
        let coeffs = a.prefix(8);
        for name in ["f1", "f2", "f3"] {
            let f = named_test_function(name).unwrap();
            for grid in [
                Grid::Boundary(BoundaryGrid::new(1024).unwrap()),
                Grid::Disk(DiskGrid::new(1.0, 10.0, 1.0, 100).unwrap()),
            ] {
                let out = synthesize_partial_sums(&f, &a, &grid, 8, &[3, 8]).unwrap();
                for (k, z) in grid.points().iter().enumerate() {
                    let oracle = evaluate_direct(&f, &coeffs, *z).unwrap();
                    assert!((out[1].values[k] - oracle).norm() <= 1e-10, "{name} at {z}");
                    let oracle3 = evaluate_direct(&f, &coeffs[..3], *z).unwrap();
                    assert!((out[0].values[k] - oracle3).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn fixed_point_shortcut_keeps_long_sums() {
        let f = named_test_function("f1").unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(16).unwrap());
        let a = CoefficientSequence::real(&[1.0; 100]);
        let out = synthesize_partial_sums(&f, &a, &grid, 100, &[50, 100]).unwrap();
        assert_eq!(out[0].values[0], c(50.0, 0.0));
        assert_eq!(out[1].values[0], c(100.0, 0.0));
    }

    #[test]
    fn rejects_bad_checkpoints() {
        let f = named_test_function("f2").unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(16).unwrap());
        let a = CoefficientSequence::real(&[1.0]);
        assert!(synthesize_partial_sums(&f, &a, &grid, 4, &[3, 2]).is_err());
        assert!(synthesize_partial_sums(&f, &a, &grid, 4, &[5]).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        let decay = DecayConstants::prescribed(0.5, 0.5).unwrap();
        let a = CoefficientSequence::real(&[1.0, 2.0, 3.0]);
        assert_eq!(tail_bound(&a, 3, &decay).unwrap(), 0.0);
        let b = CoefficientSequence::real(&[0.0, 1.0]);
        assert!((tail_bound(&b, 1, &decay).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exports() {
        let f = named_test_function("f1").unwrap();
        let grid = Grid::Boundary(BoundaryGrid::new(4).unwrap());
        let out = synthesize_partial_sums(&f, &CoefficientSequence::real(&[1.0]), &grid, 1, &[1])
            .unwrap();
        let mut csv = Vec::new();
        out[0].write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("angle,re,im\n0,1,0\n"));
        let mut bin = Vec::new();
        out[0].write_binary(&mut bin).unwrap();
        assert_eq!(bin.len(), 4 * 24);
    }
}
