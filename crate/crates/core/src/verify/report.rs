use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Strict;
use crate::norms::NormOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Pass/fail enters the suite exit status.
    Hard,
    /// Numerical evidence only; reported but never fails the suite.
    Signature,
}

/// Outcome of one registered check.
///
/// `pass` is exactly `margin >= -tolerance`. Checks with several conditions
/// report every condition in `measured` (as `margin:<name>`) and set
/// `margin = min_i (margin_i + tolerance_i) - tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub kind: CheckKind,
    pub config_digest: String,
    #[serde(deserialize_with = "lenient::map")]
    pub measured: BTreeMap<String, f64>,
    #[serde(deserialize_with = "lenient::number")]
    pub bound: f64,
    #[serde(deserialize_with = "lenient::number")]
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub runtime: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<NormOutput>,
    /// Named `(x, y)` series for plot-data export.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub series: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Accumulates the measurements of a check before it is finalized.
#[derive(Debug, Default)]
pub struct Outcome {
    pub measured: BTreeMap<String, f64>,
    pub bound: f64,
    conditions: Vec<(String, f64, f64)>,
    pub norms: Vec<NormOutput>,
    pub series: BTreeMap<String, Vec<[f64; 2]>>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.measured.insert(name.into(), value);
        self
    }

    pub fn bound(&mut self, bound: f64) -> &mut Self {
        self.bound = bound;
        self
    }

    /// Registers a condition `margin >= -tolerance`.
    pub fn condition(&mut self, name: impl Into<String>, margin: f64, tolerance: f64) -> &mut Self {
        let name = name.into();
        self.measured.insert(format!("margin:{name}"), margin);
        self.conditions.push((name, margin, tolerance));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn series(&mut self, name: impl Into<String>, points: Vec<[f64; 2]>) -> &mut Self {
        self.series.insert(name.into(), points);
        self
    }

    pub(crate) fn finish(
        self,
        check_id: &str,
        kind: CheckKind,
        tolerance: f64,
        config_digest: &str,
        seed: u64,
        runtime: f64,
    ) -> VerificationReport {
        let margin = if self.conditions.is_empty() {
            f64::NEG_INFINITY
        } else if self.conditions.len() == 1 {
            self.conditions[0].1 + self.conditions[0].2 - tolerance
        } else {
            self.conditions
                .iter()
                .map(|(_, m, t)| m + t)
                .fold(f64::INFINITY, Strict::smin)
                - tolerance
        };
        // NaN margins fail.
        let pass = margin >= -tolerance;
        let measured = self
            .measured
            .into_iter()
            .map(|(k, v)| (k, clamp_infinite(v)))
            .collect();
        VerificationReport {
            check_id: check_id.to_string(),
            kind,
            config_digest: config_digest.to_string(),
            measured,
            bound: clamp_infinite(self.bound),
            margin: clamp_infinite(margin),
            tolerance,
            pass,
            seed,
            runtime,
            norms: self.norms,
            series: self
                .series
                .into_iter()
                .map(|(k, pts)| {
                    let pts = pts
                        .into_iter()
                        .map(|[x, y]| [clamp_infinite(x), clamp_infinite(y)])
                        .collect();
                    (k, pts)
                })
                .collect(),
            notes: self.notes,
        }
    }
}

/// JSON has no infinities; they are stored as the largest finite values.
fn clamp_infinite(x: f64) -> f64 {
    if x.is_infinite() {
        f64::MAX.copysign(x)
    } else {
        x
    }
}

/// NaN serializes as `null`; read it back as NaN.
mod lenient {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer};

    pub fn number<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub fn map<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, Option<f64>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|(k, v)| (k, v.unwrap_or(f64::NAN)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_margin() {
        let mut o = Outcome::new();
        o.condition("a", -0.5e-9, 1e-9).condition("b", 0.1, 0.0);
        let r = o.finish("x", CheckKind::Hard, 1e-9, "d", 1, 0.0);
        assert!(r.pass);
        let mut o = Outcome::new();
        o.condition("a", 1.0, 1e-9).condition("b", -1e-3, 0.0);
        assert!(!o.finish("x", CheckKind::Hard, 1e-9, "d", 1, 0.0).pass);
    }

    #[test]
    fn nan_fails() {
        let mut o = Outcome::new();
        o.condition("a", f64::NAN, 1.0);
        assert!(!o.finish("x", CheckKind::Hard, 1.0, "d", 1, 0.0).pass);
    }
}
