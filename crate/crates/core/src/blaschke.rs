use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Wire form of a Blaschke product: `{"zeros": [[re, im], ...], "rotation": [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeSpec {
    pub zeros: Vec<[f64; 2]>,
    pub rotation: [f64; 2],
}

/// A finite Blaschke product `rotation * prod (z - a_k) / (1 - conj(a_k) z)`
/// with a zero at the origin and degree at least two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeSpec", into = "BlaschkeSpec")]
pub struct FiniteBlaschkeProduct {
    zeros: Vec<Complex64>,
    rotation: Complex64,
    derivative_at_origin: Complex64,
    origin_multiplicity: usize,
    /// The zeros other than the origin.
    moving: Vec<Complex64>,
}

impl FiniteBlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64) -> Result<Self> {
        let violations = Self::violations(&zeros, rotation);
        if !violations.is_empty() {
            return Err(Error::InvalidBlaschke(violations.join("; ")));
        }
        let origin_multiplicity = zeros.iter().filter(|a| is_origin(**a)).count();
        let derivative_at_origin = if origin_multiplicity > 1 {
            Complex64::new(0.0, 0.0)
        } else {
            zeros
                .iter()
                .filter(|a| !is_origin(**a))
                .fold(rotation, |acc, a| acc * (-a))
        };
        let moving = zeros.iter().copied().filter(|a| !is_origin(*a)).collect();
        Ok(Self {
            zeros,
            rotation,
            derivative_at_origin,
            origin_multiplicity,
            moving,
        })
    }

    /// Every invariant the zero list and rotation break, as human-readable messages.
    pub fn violations(zeros: &[Complex64], rotation: Complex64) -> Vec<String> {
        let mut out = Vec::new();
        for (k, a) in zeros.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                out.push(format!("zero {k} is not finite"));
            } else if a.norm() >= 1.0 - tolerances::ZERO_MARGIN {
                out.push(format!("zero {k} has modulus {} (must be < 1)", a.norm()));
            }
        }
        if zeros.len() < 2 {
            out.push(format!(
                "degree must be at least 2 (got {}); degree one with f(0)=0 is a rotation",
                zeros.len()
            ));
        }
        if !zeros.iter().any(|a| is_origin(*a)) {
            out.push("f(0) must be 0: no zero at the origin".to_string());
        }
        let modulus = rotation.norm();
        if !modulus.is_finite() || (modulus - 1.0).abs() > tolerances::ROTATION_MODULUS {
            out.push(format!(
                "rotation must have modulus 1 (got {modulus})"
            ));
        }
        out
    }

    /// `z^d` with unit rotation.
    pub fn monomial(degree: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); degree], Complex64::new(1.0, 0.0))
    }

    pub fn from_zeros(zeros: &[Complex64]) -> Result<Self> {
        Self::new(zeros.to_vec(), Complex64::new(1.0, 0.0))
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `f'(0)`; zero when the origin is a multiple zero.
    pub fn derivative_at_origin(&self) -> Complex64 {
        self.derivative_at_origin
    }

    /// True when every zero sits at the origin, i.e. `f = rotation * z^d`.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|a| is_origin(*a))
    }

    /// Evaluates `f(z)` for `|z| <= 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disc(z)?;
        Ok(self.eval_unchecked(z))
    }

    /// Evaluation without the domain check, for inner loops that already
    /// guarantee `|z| <= 1`.
    #[inline]
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let mut num = self.rotation;
        let mut den = Complex64::new(1.0, 0.0);
        for a in &self.zeros {
            if is_origin(*a) {
                num *= z;
            } else {
                num *= z - a;
                den *= Complex64::new(1.0, 0.0) - a.conj() * z;
            }
        }
        num / den
    }

    /// `f(z)` for `|z| = 1`, returned on the circle. There `|z - a| = |1 - conj(a) z|`,
    /// so `num * conj(den)` has the right argument and only needs normalizing.
    #[inline]
    pub fn eval_on_circle(&self, z: Complex64) -> Complex64 {
        let mut num = self.rotation;
        for _ in 0..self.origin_multiplicity {
            num *= z;
        }
        let mut den = Complex64::new(1.0, 0.0);
        for a in &self.moving {
            num *= z - a;
            den *= Complex64::new(1.0, 0.0) - a.conj() * z;
        }
        let q = num * den.conj();
        q * q.norm_sqr().sqrt().recip()
    }

    /// `eval_on_circle` applied in place to a batch of points.
    pub(crate) fn eval_on_circle_batch<const L: usize>(&self, w: &mut [Complex64; L]) {
        let (mut nr, mut ni) = ([self.rotation.re; L], [self.rotation.im; L]);
        let (mut dr, mut di) = ([1.0; L], [0.0; L]);
        for _ in 0..self.origin_multiplicity {
            for i in 0..L {
                let (x, y) = (w[i].re, w[i].im);
                (nr[i], ni[i]) = (nr[i] * x - ni[i] * y, nr[i] * y + ni[i] * x);
            }
        }
        for a in &self.moving {
            for i in 0..L {
                let (x, y) = (w[i].re, w[i].im);
                let (ur, ui) = (x - a.re, y - a.im);
                (nr[i], ni[i]) = (nr[i] * ur - ni[i] * ui, nr[i] * ui + ni[i] * ur);
                // 1 - conj(a) z
                let (vr, vi) = (1.0 - (a.re * x + a.im * y), -(a.re * y - a.im * x));
                (dr[i], di[i]) = (dr[i] * vr - di[i] * vi, dr[i] * vi + di[i] * vr);
            }
        }
        for i in 0..L {
            let (qr, qi) = (nr[i] * dr[i] + ni[i] * di[i], ni[i] * dr[i] - nr[i] * di[i]);
            let r = (qr * qr + qi * qi).sqrt().recip();
            w[i] = Complex64::new(qr * r, qi * r);
        }
    }

    /// `f'(z)` by the product rule over the Möbius factors.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disc(z)?;
        Ok(self.derivative_unchecked(z))
    }

    pub fn derivative_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let d = self.zeros.len();
        let mut values = Vec::with_capacity(d);
        let mut slopes = Vec::with_capacity(d);
        for a in &self.zeros {
            if is_origin(*a) {
                values.push(z);
                slopes.push(one);
            } else {
                let den = one - a.conj() * z;
                values.push((z - a) / den);
                slopes.push(Complex64::new(1.0 - a.norm_sqr(), 0.0) / (den * den));
            }
        }
        // prefix[k] = prod_{j<k} values[j]
        let mut prefix = vec![one; d + 1];
        for k in 0..d {
            prefix[k + 1] = prefix[k] * values[k];
        }
        let mut suffix = one;
        let mut total = Complex64::new(0.0, 0.0);
        for k in (0..d).rev() {
            total += prefix[k] * slopes[k] * suffix;
            suffix *= values[k];
        }
        self.rotation * total
    }
}

impl TryFrom<BlaschkeSpec> for FiniteBlaschkeProduct {
    type Error = Error;

    fn try_from(spec: BlaschkeSpec) -> Result<Self> {
        let zeros = spec
            .zeros
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::new(zeros, Complex64::new(spec.rotation[0], spec.rotation[1]))
    }
}

impl From<FiniteBlaschkeProduct> for BlaschkeSpec {
    fn from(f: FiniteBlaschkeProduct) -> Self {
        BlaschkeSpec {
            zeros: f.zeros.iter().map(|a| [a.re, a.im]).collect(),
            rotation: [f.rotation.re, f.rotation.im],
        }
    }
}

#[inline]
fn is_origin(a: Complex64) -> bool {
    a.re == 0.0 && a.im == 0.0
}

pub(crate) fn check_closed_disc(z: Complex64) -> Result<()> {
    let r = z.norm();
    if r.is_nan() || r > 1.0 + tolerances::BOUNDARY {
        return Err(Error::Domain(format!(
            "|z| = {r} lies outside the closed unit disc"
        )));
    }
    Ok(())
}

pub(crate) fn check_open_disc(z: Complex64, what: &str) -> Result<()> {
    let r = z.norm();
    if r.is_nan() || r >= 1.0 {
        return Err(Error::Domain(format!(
            "{what}: |z| = {r} is not inside the open unit disc"
        )));
    }
    Ok(())
}

/// The default test functions: `f1 = z^2`, `f2 = z (z - 1/2)/(1 - z/2)`,
/// `f3` with zeros `{0, 0.4, -0.3i}` and the superattracting
/// `f4 = z^2 (z - 0.3)/(1 - 0.3 z)`.
pub fn named_test_function(name: &str) -> Option<FiniteBlaschkeProduct> {
    let c = Complex64::new;
    let zeros = match name {
        "f1" => vec![c(0.0, 0.0), c(0.0, 0.0)],
        "f2" => vec![c(0.0, 0.0), c(0.5, 0.0)],
        "f3" => vec![c(0.0, 0.0), c(0.4, 0.0), c(0.0, -0.3)],
        "f4" => vec![c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)],
        _ => return None,
    };
    FiniteBlaschkeProduct::from_zeros(&zeros).ok()
}

pub const TEST_FUNCTION_NAMES: [&str; 4] = ["f1", "f2", "f3", "f4"];

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn f2() -> FiniteBlaschkeProduct {
        named_test_function("f2").unwrap()
    }

    #[test]
    fn monomial_value() {
        let f = FiniteBlaschkeProduct::monomial(2).unwrap();
        assert_eq!(f.eval(c(0.5, 0.0)).unwrap(), c(0.25, 0.0));
    }

    #[test]
    fn f2_boundary_and_origin() {
        let f = f2();
        let at_one = f.eval(c(1.0, 0.0)).unwrap();
        assert!((at_one - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(f.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn derivatives_at_examples() {
        let sq = FiniteBlaschkeProduct::monomial(2).unwrap();
        assert!((sq.derivative(c(0.3, 0.0)).unwrap() - c(0.6, 0.0)).norm() < 1e-15);
        assert_eq!(sq.derivative(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(sq.derivative_at_origin(), c(0.0, 0.0));
        let f = f2();
        assert!((f.derivative(c(0.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(f.derivative_at_origin(), c(-0.5, 0.0));
        let f3 = named_test_function("f3").unwrap();
        assert!((f3.derivative_at_origin() - c(0.0, -0.12)).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = tolerances::FINITE_DIFFERENCE_STEP;
        for name in TEST_FUNCTION_NAMES {
            let f = named_test_function(name).unwrap();
            for z in [c(0.3, 0.2), c(-0.6, 0.1), c(0.05, -0.7), c(0.8, 0.0)] {
                let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
                let d = f.derivative(z).unwrap();
                assert!((fd - d).norm() <= 1e-6 * d.norm().max(1e-3), "{name} at {z}");
            }
        }
    }

    #[test]
    fn rejects_points_outside_closed_disc() {
        let f = f2();
        assert!(matches!(f.eval(c(1.0 + 1e-9, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(f.derivative(c(0.0, 1.1)), Err(Error::Domain(_))));
        assert!(f.eval(c(1.0 + 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn invariant_violations_are_reported() {
        let err = FiniteBlaschkeProduct::from_zeros(&[c(0.2, 0.0), c(0.5, 0.0)]).unwrap_err();
        assert!(err.to_string().contains("f(0) must be 0"));
        assert!(FiniteBlaschkeProduct::from_zeros(&[c(0.0, 0.0)]).is_err());
        assert!(FiniteBlaschkeProduct::from_zeros(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(FiniteBlaschkeProduct::new(vec![c(0.0, 0.0); 2], c(0.9, 0.0)).is_err());
    }

    #[test]
    fn json_wire_format() {
        let f = f2();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"zeros":[[0.0,0.0],[0.5,0.0]],"rotation":[1.0,0.0]}"#);
        let back: FiniteBlaschkeProduct = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad: std::result::Result<FiniteBlaschkeProduct, _> =
            serde_json::from_str(r#"{"zeros":[[0.1,0.0],[0.5,0.0]],"rotation":[1.0,0.0]}"#);
        assert!(bad.is_err());
    }
}
