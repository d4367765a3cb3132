//! Golden-file verification.
//!
//! A golden case is a directory holding `config.json` and `expected.json`:
//! `{"tolerances": {"results.distance": 1e-9, ...}, "report": {...}}`.
//! Each tolerance applies to the numeric leaves under its dotted path;
//! every other leaf must match exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config;
use crate::report::{to_json, Report};
use crate::runner::run_scenario;
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Golden {
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub report: Report,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseOutcome {
    pub name: String,
    pub byte_identical: bool,
    pub deterministic: bool,
    pub mismatches: Vec<String>,
}

impl CaseOutcome {
    pub fn pass(&self) -> bool {
        self.deterministic && self.mismatches.is_empty()
    }
}

/// The case directories under `dir`: `dir` itself when it holds a
/// `config.json`, else its immediate subdirectories that do.
pub fn cases(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if dir.join("config.json").is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("config.json").is_file())
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(CliError::Config(format!("no golden cases under {}", dir.display())));
    }
    Ok(out)
}

fn single_scenario(case: &Path) -> Result<config::Scenario, CliError> {
    let mut scenarios = config::load(&case.join("config.json"))?.into_scenarios();
    if scenarios.len() != 1 {
        return Err(CliError::Config(format!("{}: a golden case holds exactly one scenario", case.display())));
    }
    Ok(scenarios.remove(0))
}

pub fn verify_case(case: &Path) -> Result<CaseOutcome, CliError> {
    let scenario = single_scenario(case)?;
    let path = case.join("expected.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let golden: Golden = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let (first, _) = run_scenario(&scenario, None)?;
    let (second, _) = run_scenario(&scenario, None)?;
    let deterministic = to_json(&first) == to_json(&second);
    let byte_identical = to_json(&first) == to_json(&golden.report);
    let mut mismatches = Vec::new();
    if !byte_identical {
        let actual = serde_json::to_value(&first).expect("report serializes");
        let expected = serde_json::to_value(&golden.report).expect("report serializes");
        compare(&expected, &actual, "", &golden.tolerances, &mut mismatches);
    }
    Ok(CaseOutcome { name: scenario.name, byte_identical, deterministic, mismatches })
}

/// Rewrites `expected.json` from a fresh run, keeping existing tolerances.
pub fn bless_case(case: &Path) -> Result<(), CliError> {
    let scenario = single_scenario(case)?;
    let path = case.join("expected.json");
    let tolerances = std::fs::read_to_string(&path)
        .ok()
        .and_then(|t| serde_json::from_str::<Golden>(&t).ok())
        .map(|g| g.tolerances)
        .unwrap_or_default();
    let (report, _) = run_scenario(&scenario, None)?;
    std::fs::write(&path, to_json(&Golden { tolerances, report })).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn tolerance(path: &str, tolerances: &BTreeMap<String, f64>) -> Option<f64> {
    tolerances
        .iter()
        .filter(|(k, _)| path == k.as_str() || path.starts_with(&format!("{k}.")))
        .max_by_key(|(k, _)| k.len())
        .map(|(_, v)| *v)
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

pub fn compare(expected: &Value, actual: &Value, path: &str, tolerances: &BTreeMap<String, f64>, out: &mut Vec<String>) {
    match (expected, actual) {
        (Value::Object(e), Value::Object(a)) => {
            for (k, ev) in e {
                match a.get(k) {
                    Some(av) => compare(ev, av, &join(path, k), tolerances, out),
                    None => out.push(format!("{}: missing", join(path, k))),
                }
            }
            for k in a.keys().filter(|k| !e.contains_key(*k)) {
                out.push(format!("{}: unexpected field", join(path, k)));
            }
        }
        (Value::Array(e), Value::Array(a)) => {
            if e.len() != a.len() {
                out.push(format!("{path}: length {} != {}", a.len(), e.len()));
                return;
            }
            for (i, (ev, av)) in e.iter().zip(a).enumerate() {
                compare(ev, av, &join(path, &i.to_string()), tolerances, out);
            }
        }
        (Value::Number(e), Value::Number(a)) => {
            let (x, y) = (e.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            let tol = tolerance(path, tolerances).unwrap_or(0.0);
            if !(x == y || (x - y).abs() <= tol) {
                out.push(format!("{path}: {y} differs from {x} (tolerance {tol})"));
            }
        }
        (e, a) if e == a => {}
        (e, a) => out.push(format!("{path}: {a} != {e}")),
    }
}
