//! Experiment configuration: JSON schema validation followed by semantic
//! validation, with every violation collected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blaschke::{BlaschkeSpec, FiniteBlaschkeProduct};
use crate::coefficients::{CoefficientSequence, SignModel};
use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, DiskGrid};
use crate::named_test_function;
use crate::verify::find_check;

/// The published schema for configuration files.
pub const SCHEMA: &str = include_str!("../schema/experiment_config.schema.json");

/// A named test function (`"f1"` .. `"f4"`) or an explicit product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlaschkeChoice {
    Named(String),
    Spec(BlaschkeSpec),
}

impl BlaschkeChoice {
    pub fn build(&self) -> Result<FiniteBlaschkeProduct> {
        match self {
            Self::Named(name) => named_test_function(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown test function {name:?}"))),
            Self::Spec(spec) => FiniteBlaschkeProduct::try_from(spec.clone()),
        }
    }

    fn violations(&self) -> Vec<String> {
        match self {
            Self::Named(name) => match named_test_function(name) {
                Some(_) => Vec::new(),
                None => vec![format!("blaschke: unknown test function {name:?}")],
            },
            Self::Spec(spec) => {
                let zeros: Vec<Complex64> =
                    spec.zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                let rotation = Complex64::new(spec.rotation[0], spec.rotation[1]);
                FiniteBlaschkeProduct::violations(&zeros, rotation)
                    .into_iter()
                    .map(|v| format!("blaschke: {v}"))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub plotdata_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub blaschke: BlaschkeChoice,
    pub coefficients: CoefficientSequence,
    #[serde(default = "default_boundary_grid")]
    pub boundary_grid: BoundaryGrid,
    #[serde(default = "default_disk_grid")]
    pub disk_grid: DiskGrid,
    /// `N` for `series` and `norms`.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub checkpoints: Vec<usize>,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// Restricts `verify` to these checks; empty means all.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output: OutputPaths,
    /// Per-check parameter overrides, keyed by check id.
    #[serde(default)]
    pub check_params: BTreeMap<String, serde_json::Value>,
    /// Record wall-clock runtimes in reports (breaks byte determinism).
    #[serde(default)]
    pub timings: bool,
}

fn default_boundary_grid() -> BoundaryGrid {
    BoundaryGrid { size: 1 << 12 }
}

fn default_disk_grid() -> DiskGrid {
    DiskGrid {
        j_min: 1.0,
        j_max: 9.0,
        j_step: 1.0,
        angles: 64,
    }
}

fn default_truncation() -> usize {
    64
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            blaschke: BlaschkeChoice::Named("f2".into()),
            coefficients: CoefficientSequence::PowerLaw {
                scale: 1.0,
                exponent: 0.75,
                signs: SignModel::Rademacher,
                seed: 1,
            },
            boundary_grid: default_boundary_grid(),
            disk_grid: default_disk_grid(),
            truncation: default_truncation(),
            checkpoints: Vec::new(),
            tolerances: BTreeMap::new(),
            seed: 20240601,
            checks: Vec::new(),
            output: OutputPaths::default(),
            check_params: BTreeMap::new(),
            timings: false,
        }
    }
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form, in hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn blaschke_product(&self) -> Result<FiniteBlaschkeProduct> {
        self.blaschke.build()
    }

    /// Checkpoints for `series`, always including the truncation.
    pub fn effective_checkpoints(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .checkpoints
            .iter()
            .copied()
            .filter(|c| *c <= self.truncation)
            .collect();
        c.push(self.truncation);
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Semantic checks the schema cannot express.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.blaschke.violations();
        if let Err(e) = self.coefficients.validate() {
            out.push(format!("coefficients: {e}"));
        }
        if self.boundary_grid.size == 0 {
            out.push("boundary_grid.size must be positive".into());
        }
        if let Err(e) = self.disk_grid.validate() {
            out.push(format!("disk_grid: {e}"));
        }
        for c in &self.checkpoints {
            if *c > self.truncation {
                out.push(format!("checkpoint {c} exceeds truncation {}", self.truncation));
            }
        }
        for id in self.checks.iter() {
            if find_check(id).is_none() {
                out.push(format!("checks: unknown check {id:?}"));
            }
        }
        for (id, tol) in &self.tolerances {
            if find_check(id).is_none() {
                out.push(format!("tolerances: unknown check {id:?}"));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                out.push(format!("tolerances.{id}: must be finite and >= 0"));
            }
        }
        for id in self.check_params.keys() {
            if find_check(id).is_none() {
                out.push(format!("check_params: unknown check {id:?}"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Validates `text` against [`SCHEMA`], deserializes it and runs the
/// semantic checks. All violations are reported together.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("parse error: {e}")]))?;
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).expect("schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let schema_errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| {
            let path = e.instance_path().to_string();
            format!("schema: {}: {e}", if path.is_empty() { "/" } else { &path })
        })
        .collect();
    if !schema_errors.is_empty() {
        return Err(Error::Config(schema_errors));
    }
    let config: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| Error::Config(vec![format!("schema: {e}")]))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = ExperimentConfig::default();
        let back = parse_config(&c.to_json_pretty()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.digest(), back.digest());
    }

    #[test]
    fn missing_origin_zero_is_reported() {
        let text = r#"{"blaschke": {"zeros": [[0.5, 0], [0.2, 0]], "rotation": [1, 0]},
                       "coefficients": {"kind": "explicit", "values": [[1, 0]]}, "seed": 1}"#;
        match parse_config(text) {
            Err(Error::Config(v)) => assert!(v.iter().any(|m| m.contains("f(0) must be 0"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_violations_collected() {
        let text = r#"{"blaschke": {"zeros": [[1.5, 0], [0.2, 0]], "rotation": [0.9, 0]},
                       "coefficients": {"kind": "explicit", "values": []}, "seed": 1,
                       "checks": ["gram_identity", "bogus"]}"#;
        let Err(Error::Config(v)) = parse_config(text) else {
            panic!("expected config error")
        };
        assert!(v.len() >= 4, "{v:?}");
    }

    #[test]
    fn schema_rejects_unknown_fields() {
        let text = r#"{"blaschke": "f1", "coefficients": {"kind": "explicit", "values": []},
                       "seed": 1, "extra": 3}"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }
}
