//! Experiment configuration.
//!
//! ```json
//! {
//!   "command": "noether",
//!   "grid": { "a": 0, "b": 1, "n": 1000, "pad": 0.01 },
//!   "scale": { "epsilon": 0.001, "mu": "0" },
//!   "problem": { "lagrangian": "0.5*v1^2", "path": "t", "tau": "1", "xi": "0" },
//!   "output": "out/free_particle"
//! }
//! ```
//!
//! `problem` depends on the command; see the structs below. Complex numbers
//! are written either as a plain number or as `[re, im]`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;
use scalevar_core::lagdsl::Params;
use scalevar_core::Mu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Deriv,
    Functional,
    CheckEl,
    CheckDbr,
    Invariance,
    Noether,
    Schrodinger,
    Holder,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Deriv => "deriv",
            Command::Functional => "functional",
            Command::CheckEl => "check-el",
            Command::CheckDbr => "check-dbr",
            Command::Invariance => "invariance",
            Command::Noether => "noether",
            Command::Schrodinger => "schrodinger",
            Command::Holder => "holder",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub grid: GridConfig,
    pub scale: Option<ScaleConfig>,
    pub problem: Value,
    pub output: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    #[serde(default)]
    pub pad: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub epsilon: f64,
    pub mu: Mu,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Complex64 {
        match v {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// One expression or a list of per-component expressions.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Components {
    One(String),
    Many(Vec<String>),
}

impl Components {
    pub fn list(&self) -> Vec<&str> {
        match self {
            Components::One(s) => vec![s.as_str()],
            Components::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

pub fn params(raw: &BTreeMap<String, ComplexValue>) -> Params {
    raw.iter().map(|(k, v)| (k.clone(), Complex64::from(*v))).collect()
}

/// `deriv`: `□_ε` of a path given by expressions in `t`, optionally with
/// ε → 0 extrapolation at chosen times.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivProblem {
    pub path: Components,
    #[serde(default)]
    pub params: BTreeMap<String, ComplexValue>,
    pub extrapolate_at: Option<Vec<f64>>,
    pub epsilons: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
}

/// `functional`, `check-el`, `check-dbr`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianProblem {
    pub lagrangian: String,
    pub path: Components,
    #[serde(default)]
    pub params: BTreeMap<String, ComplexValue>,
}

/// `invariance`, `noether`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryProblem {
    pub lagrangian: String,
    pub path: Components,
    pub tau: String,
    pub xi: Components,
    pub s_step: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, ComplexValue>,
}

/// `schrodinger`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerConfig {
    pub psi: String,
    #[serde(default = "zero_potential")]
    pub potential: String,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
    pub q0: Vec<ComplexValue>,
    #[serde(default)]
    pub params: BTreeMap<String, ComplexValue>,
    /// Times of the residual probe lattice; 11 evenly spaced times in
    /// `[a, b]` by default.
    pub probe_times: Option<Vec<f64>>,
    /// Points of the residual probe lattice; the trajectory at the probe
    /// times by default.
    pub probe_points: Option<Vec<Vec<ComplexValue>>>,
}

fn zero_potential() -> String {
    "0".into()
}

fn one() -> f64 {
    1.0
}

/// `holder`: either a path expression in `t` or a Weierstrass function.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderProblem {
    pub path: Option<String>,
    pub weierstrass: Option<WeierstrassConfig>,
    #[serde(default)]
    pub params: BTreeMap<String, ComplexValue>,
    pub deltas: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeierstrassConfig {
    pub a: f64,
    pub b: f64,
    #[serde(default = "default_truncation")]
    pub tol: f64,
}

fn default_samples() -> usize {
    2000
}

fn default_truncation() -> f64 {
    1e-12
}

/// Reads the config, applies `key=value` overrides and checks the schema.
pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let mut value: Value = serde_json::from_str(&text).map_err(CliError::Json)?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    from_value(value, "")
}

/// Deserializes `value`, naming the offending field on failure.
pub fn from_value<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let field = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        CliError::field(field, e.into_inner())
    })
}

/// Sets a dotted `key` to `value`. The value is parsed as JSON unless the
/// existing entry is a string, or it is not valid JSON.
pub fn apply_override(root: &mut Value, entry: &str) -> Result<(), CliError> {
    let (key, raw) = entry.split_once('=').ok_or_else(|| CliError::Override(entry.into()))?;
    if key.is_empty() {
        return Err(CliError::Override(entry.into()));
    }
    let mut slot = root;
    for part in key.split('.') {
        let obj = match slot {
            Value::Object(map) => map,
            _ => return Err(CliError::field(key, "cannot descend into a non-object")),
        };
        slot = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    *slot = match slot {
        Value::String(_) => Value::String(raw.into()),
        _ => serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into())),
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn override_keeps_strings_as_strings() {
        let mut v = json!({"scale": {"epsilon": 0.1, "mu": "0"}});
        apply_override(&mut v, "scale.mu=1").unwrap();
        apply_override(&mut v, "scale.epsilon=0.5").unwrap();
        apply_override(&mut v, "problem.s_step=0.001").unwrap();
        assert_eq!(v, json!({"scale": {"epsilon": 0.5, "mu": "1"}, "problem": {"s_step": 0.001}}));
        assert!(apply_override(&mut v, "novalue").is_err());
        assert!(apply_override(&mut v, "scale.mu.x=1").is_err());
    }

    #[test]
    fn field_errors_name_the_path() {
        let v = json!({"command": "noether", "grid": {"a": 0, "b": 1, "n": 10},
            "scale": {"epsilon": 0.1, "mu": "2"}, "problem": {}, "output": "x"});
        match from_value::<ExperimentConfig>(v, "") {
            Err(CliError::Field { field, .. }) => assert_eq!(field, "scale.mu"),
            other => panic!("{other:?}"),
        }
        match from_value::<LagrangianProblem>(json!({"path": "t"}), "problem") {
            Err(CliError::Field { field, message }) => {
                assert_eq!(field, "problem");
                assert!(message.contains("lagrangian"));
            }
            other => panic!("{other:?}"),
        }
        match from_value::<SchrodingerConfig>(json!({"psi": "1", "q0": ["x"]}), "problem") {
            Err(CliError::Field { field, .. }) => assert_eq!(field, "problem.q0[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_values() {
        let v: Vec<ComplexValue> = serde_json::from_value(json!([1.5, [0, -2]])).unwrap();
        assert_eq!(Complex64::from(v[0]), Complex64::new(1.5, 0.0));
        assert_eq!(Complex64::from(v[1]), Complex64::new(0.0, -2.0));
    }
}
