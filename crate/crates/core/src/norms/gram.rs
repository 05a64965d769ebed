use num_complex::Complex64;

use crate::error::{Error, Result};

/// Above this length the Toeplitz form is summed by recurrence instead of
/// the double sum.
const DIRECT_LIMIT: usize = 100;

/// `||sum a_n f^n||_2^2 = sum |a_n|^2 + 2 Re sum_{n<k} conj(a_n) a_k lambda^{k-n}`
/// with `lambda = f'(0)`. Any block `a_M..a_N` gives the same form.
pub fn norm_l2_gram(a: &[Complex64], lambda: Complex64) -> Result<f64> {
    if !(lambda.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Gram generator must satisfy |lambda| < 1 (got {})",
            lambda.norm()
        )));
    }
    let diagonal: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let cross = if a.len() <= DIRECT_LIMIT {
        let mut cross = Complex64::new(0.0, 0.0);
        for n in 0..a.len() {
            let mut power = Complex64::new(1.0, 0.0);
            for k in n + 1..a.len() {
                power *= lambda;
                cross += a[n].conj() * a[k] * power;
            }
        }
        cross
    } else {
        // S_k = sum_{n<k} conj(a_n) lambda^{k-n} = lambda (S_{k-1} + conj(a_{k-1}))
        let mut s = Complex64::new(0.0, 0.0);
        let mut cross = Complex64::new(0.0, 0.0);
        for k in 1..a.len() {
            s = lambda * (s + a[k - 1].conj());
            cross += a[k] * s;
        }
        cross
    };
    Ok(diagonal + 2.0 * cross.re)
}

/// `((1 - |lambda|)/(1 + |lambda|), (1 + |lambda|)/(1 - |lambda|))`, the
/// comparison constants between `||F||_2^2` and `sum |a_n|^2`.
pub fn sandwich_constants(lambda: Complex64) -> (f64, f64) {
    let l = lambda.norm();
    ((1.0 - l) / (1.0 + l), (1.0 + l) / (1.0 - l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn examples() {
        assert_eq!(norm_l2_gram(&[c(1.0), c(1.0)], c(0.0)).unwrap(), 2.0);
        assert_eq!(norm_l2_gram(&[c(1.0), c(1.0)], c(-0.5)).unwrap(), 1.0);
        assert_eq!(norm_l2_gram(&[c(1.0)], Complex64::new(0.3, 0.4)).unwrap(), 1.0);
        assert!(norm_l2_gram(&[c(1.0)], c(1.0)).is_err());
        assert_eq!(norm_l2_gram(&[], c(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn recurrence_matches_double_sum() {
        let a: Vec<Complex64> = (0..300)
            .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let lambda = Complex64::new(-0.3, 0.5);
        let fast = norm_l2_gram(&a, lambda).unwrap();
        let mut slow = 0.0;
        for n in 0..a.len() {
            for k in 0..a.len() {
                let g = if k >= n {
                    lambda.powu((k - n) as u32)
                } else {
                    lambda.conj().powu((n - k) as u32)
                };
                slow += (a[n].conj() * a[k] * g).re;
            }
        }
        assert!((fast - slow).abs() <= 1e-11 * slow.abs());
    }

    #[test]
    fn constants() {
        let (lo, hi) = sandwich_constants(c(-0.5));
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
