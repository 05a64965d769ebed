//! Registered checks grouped into suites, and the runner that turns them
//! into [`VerificationReport`]s.

mod experiments;
mod identities;
mod inequalities;
pub mod registry;
mod report;

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub use experiments::{
    convergence_experiment, unboundedness_experiment, vmoa_decay_experiment, ConvergenceParams,
    UnboundednessParams, VmoaParams,
};
pub use registry::{find_check, CheckInfo, REGISTRY};
pub use report::{CheckKind, Outcome, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Inequalities,
    Experiments,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "identities" => Some(Self::Identities),
            "inequalities" => Some(Self::Inequalities),
            "experiments" => Some(Self::Experiments),
            "all" => Some(Self::All),
            _ => None,
        }
    }

    pub fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// What a check sees of the configuration.
pub struct CheckContext<'a> {
    pub check_id: &'a str,
    pub seed: u64,
    pub tolerance: f64,
    params: Option<&'a serde_json::Value>,
}

impl<'a> CheckContext<'a> {
    pub fn new(check_id: &'a str, seed: u64, tolerance: f64, params: Option<&'a serde_json::Value>) -> Self {
        Self {
            check_id,
            seed,
            tolerance,
            params,
        }
    }

    /// ChaCha8 seeded with `seed_from_u64(seed)` on the stream given by the
    /// FNV-1a hash of the check id, so checks never share random numbers.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(fnv1a(self.check_id));
        rng
    }

    /// The check's parameters: defaults overridden by `check_params.<id>`.
    pub fn params<P: DeserializeOwned + Default>(&self) -> Result<P> {
        match self.params {
            None => Ok(P::default()),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| {
                Error::Config(vec![format!("check_params.{}: {e}", self.check_id)])
            }),
        }
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs every registered check of `suite` (restricted to `config.checks`
/// when that list is nonempty). Reports come back sorted by check id.
pub fn run_suite(config: &ExperimentConfig, suite: Suite) -> Result<Vec<VerificationReport>> {
    let digest = config.digest();
    let selected: Vec<&CheckInfo> = REGISTRY
        .iter()
        .filter(|c| suite.contains(c.suite))
        .filter(|c| config.checks.is_empty() || config.checks.iter().any(|id| id == c.id))
        .collect();
    let mut reports: Vec<VerificationReport> = selected
        .par_iter()
        .map(|info| run_check(info, config, &digest))
        .collect::<Result<_>>()?;
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(reports)
}

pub fn verify_exact_identities(config: &ExperimentConfig) -> Result<Vec<VerificationReport>> {
    run_suite(config, Suite::Identities)
}

pub fn verify_inequalities(config: &ExperimentConfig) -> Result<Vec<VerificationReport>> {
    run_suite(config, Suite::Inequalities)
}

pub fn run_check(info: &CheckInfo, config: &ExperimentConfig, digest: &str) -> Result<VerificationReport> {
    let tolerance = config
        .tolerances
        .get(info.id)
        .copied()
        .unwrap_or(info.tolerance);
    let ctx = CheckContext::new(info.id, config.seed, tolerance, config.check_params.get(info.id));
    let start = Instant::now();
    let outcome = (info.run)(&ctx).map_err(|e| match e {
        Error::Config(v) => Error::Config(v),
        other => Error::InvalidArgument(format!("check {} aborted: {other}", info.id)),
    })?;
    let runtime = if config.timings {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(outcome.finish(info.id, info.kind, tolerance, digest, config.seed, runtime))
}

/// Exit status of a suite: true iff every hard check passed.
pub fn all_hard_checks_pass(reports: &[VerificationReport]) -> bool {
    reports
        .iter()
        .all(|r| r.kind == CheckKind::Signature || r.pass)
}

/// `min`/`max` that propagate NaN, so a NaN measurement cannot be
/// silently dropped from a worst-case fold.
pub(crate) trait Strict {
    fn smin(self, other: f64) -> f64;
    fn smax(self, other: f64) -> f64;
}

impl Strict for f64 {
    fn smin(self, other: f64) -> f64 {
        if self.is_nan() || other.is_nan() {
            f64::NAN
        } else {
            self.min(other)
        }
    }

    fn smax(self, other: f64) -> f64 {
        if self.is_nan() || other.is_nan() {
            f64::NAN
        } else {
            self.max(other)
        }
    }
}

pub(crate) fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub(crate) fn random_prefix(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| random_complex(rng)).collect()
}

/// Uniform (area) sample of the disc of radius `radius`.
pub(crate) fn random_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// Uniform sample of the annulus `inner <= |z| < outer`.
pub(crate) fn random_in_annulus(rng: &mut ChaCha8Rng, inner: f64, outer: f64) -> Complex64 {
    let u: f64 = rng.random();
    let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::from_polar(r.min(outer), theta)
}

pub(crate) fn test_function(name: &str) -> Result<crate::FiniteBlaschkeProduct> {
    crate::named_test_function(name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown test function {name:?}")))
}
