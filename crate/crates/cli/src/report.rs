//! Scenario reports, assertion checks and CSV curves.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Assertion;
use crate::CliError;

/// A table with a fixed column order, written as one CSV file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format_cell(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn format_cell(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    #[serde(flatten)]
    pub assertion: Assertion,
    pub value: Value,
    pub pass: bool,
}

impl PartialEq for Assertion {
    fn eq(&self, other: &Self) -> bool {
        serde_json::to_value(self).ok() == serde_json::to_value(other).ok()
    }
}

/// Deterministic outcome of one scenario. Wall-clock time is kept out of
/// it (see [`Timing`]) so that reruns are byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub inputs: Value,
    pub results: Value,
    /// Defect histories, one per correction run.
    pub traces: BTreeMap<String, Vec<f64>>,
    pub tables: BTreeMap<String, Table>,
    pub assertions: Vec<AssertionOutcome>,
    pub error: Option<String>,
    pub pass: bool,
}

/// Sidecar written next to a report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub wall_clock_seconds: f64,
}

/// Follows a dotted path (`a.b.3.c`) into a JSON value.
pub fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').filter(|s| !s.is_empty()).try_fold(root, |v, key| match v {
        Value::Object(m) => m.get(key),
        Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) if s == "inf" => Some(f64::INFINITY),
        _ => None,
    }
}

pub fn evaluate(assertion: &Assertion, results: &Value) -> AssertionOutcome {
    let value = lookup(results, &assertion.path).cloned().unwrap_or(Value::Null);
    let num = as_number(&value);
    let mut pass = !value.is_null();
    if let Some(le) = assertion.le {
        pass &= num.is_some_and(|x| x <= le);
    }
    if let Some(ge) = assertion.ge {
        pass &= num.is_some_and(|x| x >= ge);
    }
    if let Some(eq) = &assertion.eq {
        pass &= match (as_number(eq), num) {
            (Some(a), Some(b)) => (a - b).abs() <= assertion.tol.unwrap_or(0.0) || a == b,
            _ => *eq == value,
        };
    }
    AssertionOutcome { assertion: assertion.clone(), value, pass }
}

/// Writes one CSV per trace (`iteration,defect`) and per table.
pub fn emit_curves(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (name, defects) in &report.traces {
        let mut t = Table::new(&["iteration", "defect"]);
        t.rows = defects.iter().enumerate().map(|(i, d)| vec![i as f64, *d]).collect();
        written.push(write(dir, &format!("{}.{name}.csv", report.name), &t.to_csv())?);
    }
    for (name, table) in &report.tables {
        written.push(write(dir, &format!("{}.{name}.csv", report.name), &table.to_csv())?);
    }
    Ok(written)
}

pub fn write(dir: &Path, file: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let path = dir.join(file);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(path)
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_trace_gives_header_only() {
        let t = Table::new(&["iteration", "defect"]);
        assert_eq!(t.to_csv(), "iteration,defect\n");
    }

    #[test]
    fn trace_rows_follow_defects() {
        let dir = tempfile::tempdir().unwrap();
        let mut traces = BTreeMap::new();
        traces.insert("correction".to_string(), vec![1e-2; 9]);
        traces.insert("empty".to_string(), vec![]);
        let r = Report {
            name: "r".into(),
            kind: "haar".into(),
            seed: 0,
            inputs: Value::Null,
            results: Value::Null,
            traces,
            tables: BTreeMap::new(),
            assertions: vec![],
            error: None,
            pass: true,
        };
        emit_curves(&r, dir.path()).unwrap();
        let full = std::fs::read_to_string(dir.path().join("r.correction.csv")).unwrap();
        assert_eq!(full.lines().count(), 10);
        assert_eq!(full.lines().nth(1), Some("0,1e-2"));
        let empty = std::fs::read_to_string(dir.path().join("r.empty.csv")).unwrap();
        assert_eq!(empty, "iteration,defect\n");
    }

    #[test]
    fn assertion_paths_and_operators() {
        let results = json!({"distance": 0.05, "converged": true, "pairs": [{"value": "inf"}]});
        let a = |s: &str| serde_json::from_str::<Assertion>(s).unwrap();
        assert!(evaluate(&a(r#"{"path":"distance","le":0.1}"#), &results).pass);
        assert!(!evaluate(&a(r#"{"path":"distance","ge":0.1}"#), &results).pass);
        assert!(evaluate(&a(r#"{"path":"converged","eq":true}"#), &results).pass);
        assert!(evaluate(&a(r#"{"path":"distance","eq":0.0501,"tol":1e-3}"#), &results).pass);
        assert!(evaluate(&a(r#"{"path":"pairs.0.value","ge":1e300}"#), &results).pass);
        assert!(!evaluate(&a(r#"{"path":"missing","le":1}"#), &results).pass);
    }
}
