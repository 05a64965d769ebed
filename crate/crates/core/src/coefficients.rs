//! Coefficient sequences `a_n`, `n >= 1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signs of a power-law sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignModel {
    Plus,
    /// Independent fair signs from ChaCha8 seeded with `seed_from_u64(seed)`,
    /// one `bool` draw per coefficient in index order.
    Rademacher,
}

/// `a_n` given explicitly (zero beyond the list) or as `scale * n^{-exponent} * sign_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSequence {
    Explicit {
        values: Vec<Complex64>,
    },
    PowerLaw {
        scale: f64,
        exponent: f64,
        signs: SignModel,
        #[serde(default)]
        seed: u64,
    },
}

impl CoefficientSequence {
    pub fn explicit(values: Vec<Complex64>) -> Self {
        Self::Explicit { values }
    }

    pub fn real(values: &[f64]) -> Self {
        Self::Explicit {
            values: values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        }
    }

    pub fn power_law(scale: f64, exponent: f64, signs: SignModel, seed: u64) -> Result<Self> {
        let seq = Self::PowerLaw {
            scale,
            exponent,
            signs,
            seed,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Explicit { values } => {
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::InvalidArgument("explicit coefficients must be finite".into()));
                }
            }
            Self::PowerLaw { scale, exponent, .. } => {
                if !(scale.is_finite() && exponent.is_finite() && *exponent >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "power law needs a finite scale and exponent >= 0 (got {scale}, {exponent})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of nonzero-capable terms: the list length, or `None` for an infinite law.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            Self::Explicit { values } => Some(values.len()),
            Self::PowerLaw { .. } => None,
        }
    }

    /// `(a_1, ..., a_len)`; explicit lists are padded with zeros.
    pub fn prefix(&self, len: usize) -> Vec<Complex64> {
        match self {
            Self::Explicit { values } => {
                let mut out: Vec<Complex64> = values.iter().take(len).copied().collect();
                out.resize(len, Complex64::new(0.0, 0.0));
                out
            }
            Self::PowerLaw {
                scale,
                exponent,
                signs,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (1..=len)
                    .map(|n| {
                        let sign = match signs {
                            SignModel::Plus => 1.0,
                            SignModel::Rademacher => {
                                if rng.random::<bool>() {
                                    1.0
                                } else {
                                    -1.0
                                }
                            }
                        };
                        Complex64::new(sign * scale * (n as f64).powf(-exponent), 0.0)
                    })
                    .collect()
            }
        }
    }

    pub fn is_l2_summable(&self) -> bool {
        match self {
            Self::Explicit { .. } => true,
            Self::PowerLaw { scale, exponent, .. } => *scale == 0.0 || *exponent > 0.5,
        }
    }

    pub fn is_l1_summable(&self) -> bool {
        match self {
            Self::Explicit { .. } => true,
            Self::PowerLaw { scale, exponent, .. } => *scale == 0.0 || *exponent > 1.0,
        }
    }

    /// `sup_n |a_n|`.
    pub fn sup_modulus(&self) -> f64 {
        match self {
            Self::Explicit { values } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Self::PowerLaw { scale, .. } => scale.abs(),
        }
    }

    /// `sum_{n > len} |a_n|^2`.
    pub fn l2_tail(&self, len: usize) -> Result<f64> {
        match self {
            Self::Explicit { values } => Ok(values.iter().skip(len).map(|v| v.norm_sqr()).sum()),
            Self::PowerLaw { scale, exponent, .. } => {
                if *scale == 0.0 {
                    return Ok(0.0);
                }
                if *exponent <= 0.5 {
                    return Err(Error::Rejected(format!(
                        "power law with exponent {exponent} <= 1/2 is not square summable"
                    )));
                }
                Ok(scale * scale * hurwitz_zeta(2.0 * exponent, (len + 1) as f64))
            }
        }
    }
}

/// `sum_k |a_k|^2` over a prefix.
pub fn l2_mass(prefix: &[Complex64]) -> f64 {
    crate::grid::pairwise_sum(&prefix.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>())
}

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-sigma}` for `sigma > 1`, `q >= 1`, by
/// Euler-Maclaurin summation after `SHIFT` explicit terms.
pub fn hurwitz_zeta(sigma: f64, q: f64) -> f64 {
    const SHIFT: usize = 12;
    // B_{2j} / (2j)!
    const BERNOULLI: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    debug_assert!(sigma > 1.0 && q >= 1.0);
    let mut head = 0.0;
    for k in 0..SHIFT {
        head += (q + k as f64).powf(-sigma);
    }
    let x = q + SHIFT as f64;
    let mut tail = x.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * x.powf(-sigma);
    // rising factorial sigma (sigma+1) ... (sigma + 2j - 2) times x^{-sigma-2j+1}
    let mut rising = sigma;
    let mut power = x.powf(-sigma - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail += b * rising * power;
        let m = 2.0 * j as f64;
        rising *= (sigma + m + 1.0) * (sigma + m + 2.0);
        power /= x * x;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn prefix_is_deterministic_and_consistent() {
        let a = CoefficientSequence::power_law(1.0, 0.75, SignModel::Rademacher, 7).unwrap();
        let long = a.prefix(100);
        assert_eq!(a.prefix(100), long);
        assert_eq!(a.prefix(40)[..], long[..40]);
        assert!(long.iter().any(|v| v.re < 0.0));
        let other = CoefficientSequence::power_law(1.0, 0.75, SignModel::Rademacher, 8).unwrap();
        assert_ne!(other.prefix(100), long);
    }

    #[test]
    fn explicit_prefix_pads_with_zeros() {
        let a = CoefficientSequence::real(&[1.0, 2.0]);
        assert_eq!(a.prefix(3)[2], Complex64::new(0.0, 0.0));
        assert_eq!(a.l2_tail(0).unwrap(), 5.0);
        assert_eq!(a.l2_tail(2).unwrap(), 0.0);
    }

    #[test]
    fn summability_flags() {
        let half = CoefficientSequence::power_law(1.0, 0.5, SignModel::Plus, 0).unwrap();
        assert!(!half.is_l2_summable());
        assert!(half.l2_tail(10).is_err());
        let one = CoefficientSequence::power_law(1.0, 1.0, SignModel::Plus, 0).unwrap();
        assert!(one.is_l2_summable() && !one.is_l1_summable());
    }

    #[test]
    fn hurwitz_zeta_matches_known_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // brute-force oracle: direct sum plus integral tail
        let direct: f64 = (11..2_000_000).map(|n| (n as f64).powf(-1.5)).sum::<f64>()
            + 2.0 * (2_000_000f64 - 0.5).powf(-0.5);
        let z = hurwitz_zeta(1.5, 11.0);
        assert!((z - direct).abs() / z < 1e-9, "{z} vs {direct}");
    }

    #[test]
    fn power_law_tail_matches_summation() {
        let a = CoefficientSequence::power_law(2.0, 1.0, SignModel::Rademacher, 3).unwrap();
        let tail = a.l2_tail(100).unwrap();
        let direct: f64 = (101..1_000_000).map(|n| 4.0 / (n as f64).powi(2)).sum::<f64>()
            + 4.0 / (1_000_000f64 - 0.5);
        assert!((tail - direct).abs() / tail < 1e-9);
    }

    #[test]
    fn json_forms() {
        let a: CoefficientSequence = serde_json::from_str(
            r#"{"kind":"power_law","scale":1.0,"exponent":0.75,"signs":"rademacher","seed":5}"#,
        )
        .unwrap();
        assert!(matches!(a, CoefficientSequence::PowerLaw { seed: 5, .. }));
        let b: CoefficientSequence =
            serde_json::from_str(r#"{"kind":"explicit","values":[[1.0,0.0],[0.5,0.0]]}"#).unwrap();
        assert_eq!(b.prefix(2)[1], Complex64::new(0.5, 0.0));
    }
}
