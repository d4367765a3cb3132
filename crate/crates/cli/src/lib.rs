//! Scenario runner for `stabilize-core`: JSON configs in, deterministic
//! JSON reports, timing sidecars and CSV curves out.

pub mod config;
pub mod golden;
pub mod report;
pub mod runner;
pub mod sweep;

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

pub use runner::run_scenario;

/// Every assertion passed.
pub const EXIT_OK: i32 = 0;
/// A scenario ran but an assertion or module check failed.
pub const EXIT_FAILED: i32 = 1;
/// Bad usage, unreadable or invalid configuration, unresolved fixture.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot resolve fixture: {0}")]
    Fixture(String),
}

/// `stabilize run`: runs every scenario of the config concurrently and
/// writes `<name>.json`, `<name>.timing.json`, the CSV curves and a
/// `summary.json` into `out`.
pub fn cmd_run(config_path: &Path, seed: Option<u64>, out: &Path) -> i32 {
    match try_run(config_path, seed, out) {
        Ok(all_pass) => {
            if all_pass {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn try_run(config_path: &Path, seed: Option<u64>, out: &Path) -> Result<bool, CliError> {
    let scenarios = config::load(config_path)?.into_scenarios();
    let mut names = BTreeSet::new();
    for s in &scenarios {
        if !names.insert(s.name.as_str()) {
            return Err(CliError::Config(format!("duplicate scenario name {:?}", s.name)));
        }
        if s.name.is_empty() || s.name.contains(['/', '\\']) {
            return Err(CliError::Config(format!("scenario name {:?} is not a file name", s.name)));
        }
    }
    let results: Vec<_> = scenarios
        .par_iter()
        .map(|s| {
            let (report, timing) = run_scenario(s, seed)?;
            report::write(out, &format!("{}.json", report.name), &report::to_json(&report))?;
            report::write(out, &format!("{}.timing.json", report.name), &report::to_json(&timing))?;
            report::emit_curves(&report, out)?;
            Ok::<_, CliError>(report)
        })
        .collect();
    let mut summary = Vec::new();
    let mut all_pass = true;
    for r in results {
        let r = r?;
        all_pass &= r.pass;
        match &r.error {
            Some(e) => println!("FAIL {}: {e}", r.name),
            None if !r.pass => {
                let failed: Vec<&str> = r.assertions.iter().filter(|a| !a.pass).map(|a| a.assertion.path.as_str()).collect();
                println!("FAIL {}: assertions failed on {}", r.name, failed.join(", "));
            }
            None => println!("PASS {}", r.name),
        }
        summary.push(json!({ "name": r.name, "kind": r.kind, "pass": r.pass, "error": r.error }));
    }
    report::write(out, "summary.json", &report::to_json(&json!({ "pass": all_pass, "scenarios": summary })))?;
    Ok(all_pass)
}

/// `stabilize sweep`: runs a sweep config and writes `<name>.csv`.
pub fn cmd_sweep(config_path: &Path, out: &Path) -> i32 {
    let run = || -> Result<usize, CliError> {
        let text = std::fs::read_to_string(config_path).map_err(|e| CliError::Io(config_path.display().to_string(), e))?;
        let cfg: sweep::SweepConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
        let (table, failed) = sweep::run_sweep(&cfg)?;
        let path = report::write(out, &format!("{}.csv", cfg.name()), &table.to_csv())?;
        println!("wrote {} ({} rows, {failed} failed)", path.display(), table.rows.len());
        Ok(failed)
    };
    match run() {
        Ok(0) => EXIT_OK,
        Ok(_) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// `stabilize verify`: reruns every golden case under `dir` and compares
/// with its expected report. With `bless`, rewrites the expected reports.
pub fn cmd_verify(dir: &Path, bless: bool) -> i32 {
    let cases = match golden::cases(dir) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut code = EXIT_OK;
    for case in cases {
        if bless {
            if let Err(e) = golden::bless_case(&case) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            println!("blessed {}", case.display());
            continue;
        }
        match golden::verify_case(&case) {
            Ok(o) if o.pass() => {
                let how = if o.byte_identical { "byte-identical" } else { "within tolerances" };
                println!("ok {} ({how})", o.name);
            }
            Ok(o) => {
                code = EXIT_FAILED;
                println!("MISMATCH {}", o.name);
                if !o.deterministic {
                    println!("  two runs produced different reports");
                }
                for m in o.mismatches {
                    println!("  {m}");
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    code
}
