//! Executes one scenario and assembles its report.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use stabilize_core::algebra::{diagonal, AlgebraElement, BasisAlgebra, LinearMap, SemisimpleAlgebra};
use stabilize_core::banach::{hausdorff_certificate, min_expansion_split, operator_norm_bound, polygon_space, FinDimBanachSpace, HAUSDORFF_TOL};
use stabilize_core::colimit::{af_embedding, check_sup_metric_equality, factor_through_stage, lift_along_surjections, AfStep};
use stabilize_core::group::{rep_distance, Representation};
use stabilize_core::measure::{kr_distance, FiniteMetricSpace, FinitelySupportedMeasure};
use stabilize_core::stabilization::{
    average_intertwiner, basis_defect, haar_correct, newton_correct_with, unitarize_conjugation, CorrectionTrace,
};
use stabilize_core::{Error, C64};

use crate::config::{self, Scenario, ScenarioKind};
use crate::report::{evaluate, Report, Table, Timing};
use crate::CliError;

const HAUSDORFF_BUDGET: usize = 4_000_000;
/// Defects below this are round-off and excluded from rate estimates.
const DEFECT_FLOOR: f64 = 1e-13;
/// Rates are read off once the defect is below this.
const RATE_REGIME: f64 = 1e-2;

/// Scenario results before assertions are applied. A module error is kept
/// with whatever was computed up to that point.
struct Outcome {
    results: Value,
    traces: BTreeMap<String, Vec<f64>>,
    tables: BTreeMap<String, Table>,
    error: Option<String>,
}

impl Outcome {
    fn new(results: Value) -> Self {
        Outcome { results, traces: BTreeMap::new(), tables: BTreeMap::new(), error: None }
    }

    fn failed(err: &Error) -> Self {
        let mut o = Outcome::new(json!({}));
        o.record_error(err);
        o
    }

    fn record_error(&mut self, err: &Error) {
        match err {
            Error::Diverged { trace } | Error::NotConverged { trace } => {
                self.traces.insert("correction".into(), trace.defects.clone());
            }
            _ => {}
        }
        self.error = Some(err.to_string());
    }
}

/// Runs `scenario`, with `seed` overriding the configured seed.
pub fn run_scenario(scenario: &Scenario, seed: Option<u64>) -> Result<(Report, Timing), CliError> {
    let seed = seed.unwrap_or(scenario.seed);
    let start = Instant::now();
    log::info!("running {} ({})", scenario.name, kind_name(&scenario.kind));
    let outcome = execute(&scenario.kind, seed).map_err(|e| match e {
        CliError::Fixture(msg) => CliError::Fixture(format!("{}: {msg}", scenario.name)),
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", scenario.name)),
        other => other,
    })?;
    let assertions: Vec<_> = scenario.assertions.iter().map(|a| evaluate(a, &outcome.results)).collect();
    let pass = outcome.error.is_none() && assertions.iter().all(|a| a.pass);
    if let Some(e) = &outcome.error {
        log::warn!("{}: {e}", scenario.name);
    }
    let mut inputs = serde_json::to_value(scenario).expect("scenario serializes");
    inputs["seed"] = json!(seed);
    let report = Report {
        name: scenario.name.clone(),
        kind: kind_name(&scenario.kind).into(),
        seed,
        inputs,
        results: outcome.results,
        traces: outcome.traces,
        tables: outcome.tables,
        assertions,
        error: outcome.error,
        pass,
    };
    let timing = Timing { name: scenario.name.clone(), wall_clock_seconds: start.elapsed().as_secs_f64() };
    Ok((report, timing))
}

pub fn kind_name(kind: &ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Correct { .. } => "correct",
        ScenarioKind::Haar { .. } => "haar",
        ScenarioKind::Conjugate { .. } => "conjugate",
        ScenarioKind::Factor { .. } => "factor",
        ScenarioKind::Lift { .. } => "lift",
        ScenarioKind::Geometry { .. } => "geometry",
        ScenarioKind::Transport { .. } => "transport",
        ScenarioKind::Supmetric { .. } => "supmetric",
    }
}

fn execute(kind: &ScenarioKind, seed: u64) -> Result<Outcome, CliError> {
    match kind {
        ScenarioKind::Correct { source, map, eta, correction } => {
            config::check_eta(*eta)?;
            let clean = match map {
                config::MapFixture::Identity => LinearMap::identity(source),
                config::MapFixture::Scalar(c) => LinearMap::identity(source).scale(C64::new(*c, 0.0)),
                config::MapFixture::Embedding(m) => af_embedding(source, &AfStep::Pattern(m.clone()))
                    .map_err(|e| CliError::Fixture(e.to_string()))?,
            };
            let noisy = if *eta > 0.0 {
                clean.add(&noise(source, clean.target(), *eta, seed)).expect("same spaces")
            } else {
                clean.clone()
            };
            let before = basis_defect(&noisy);
            Ok(match newton_correct_with(&noisy, &diagonal(source), correction, |_| {}) {
                Ok(trace) => {
                    let mut results = trace_summary(&trace);
                    results["defect_before"] = json!(before);
                    results["distance_to_unperturbed"] = json!(trace.map.basis_distance(&clean).expect("same spaces"));
                    let mut o = Outcome::new(results);
                    o.traces.insert("correction".into(), trace.defects);
                    o
                }
                Err(e) => Outcome::failed(&e),
            })
        }
        ScenarioKind::Haar { group, rep, eta, correction } => {
            config::check_eta(*eta)?;
            let g = group.resolve()?;
            let phi = rep.resolve(&g)?;
            let perturbed = match phi.perturb(*eta, seed) {
                Ok(p) => p,
                Err(e) => return Ok(Outcome::failed(&e)),
            };
            Ok(match haar_correct(&perturbed, correction) {
                Ok((exact, trace)) => {
                    let mut results = trace_summary(&trace);
                    results["defect_before"] = json!(perturbed.defect());
                    results["exact_defect"] = json!(exact.defect());
                    results["distance"] = json!(rep_distance(&exact, &perturbed).expect("same shapes"));
                    results["distance_to_unperturbed"] = json!(rep_distance(&exact, &phi).expect("same shapes"));
                    results["unitary"] = json!(exact.is_unitary());
                    let mut o = Outcome::new(results);
                    o.traces.insert("correction".into(), trace.defects);
                    o
                }
                Err(e) => Outcome::failed(&e),
            })
        }
        ScenarioKind::Conjugate { group, rep, distance } => {
            if !(0.0..2.0).contains(distance) {
                return Err(CliError::Config(format!("conjugator distance {distance} is outside [0, 2)")));
            }
            let g = group.resolve()?;
            let phi = rep.resolve(&g)?;
            Ok(conjugate(&phi, *distance, seed).unwrap_or_else(|e| Outcome::failed(&e)))
        }
        ScenarioKind::Factor { group, rep, tower, eta, epsilon, correction } => {
            config::check_eta(*eta)?;
            let g = group.resolve()?;
            let base = rep.resolve(&g)?;
            let t = config::resolve_tower(tower)?;
            let up = t.structure_map(0).map_err(|e| CliError::Fixture(e.to_string()))?;
            let phi = base.push_forward(&up).map_err(|e| CliError::Fixture(e.to_string()))?;
            let perturbed = match phi.perturb(*eta, seed) {
                Ok(p) => p,
                Err(e) => return Ok(Outcome::failed(&e)),
            };
            Ok(match factor_through_stage(&perturbed, &t, *epsilon, correction) {
                Ok((exact, report)) => {
                    let mut results = serde_json::to_value(&report).expect("report serializes");
                    results["exact_defect"] = json!(exact.defect());
                    results["stages"] = json!(t.stages().len());
                    Outcome::new(results)
                }
                Err(e) => Outcome::failed(&e),
            })
        }
        ScenarioKind::Lift { group, rep, tower, tol, correction } => {
            let g = group.resolve()?;
            let phi = rep.resolve(&g)?;
            let t = config::resolve_tower(tower)?;
            Ok(match lift_along_surjections(&phi, &t, *tol, correction) {
                Ok((lift, report)) => {
                    let mut results = serde_json::to_value(&report).expect("report serializes");
                    results["lift_defect"] = json!(lift.defect());
                    Outcome::new(results)
                }
                Err(e) => Outcome::failed(&e),
            })
        }
        ScenarioKind::Geometry { hausdorff, min_expansion, operator_norms } => geometry(hausdorff, min_expansion, operator_norms),
        ScenarioKind::Transport { space, pairs } => {
            let s = config::metric_space(space);
            let mut rows = Vec::new();
            for (i, p) in pairs.iter().enumerate() {
                let mu = FinitelySupportedMeasure::from_descriptor(s.clone(), p.mu.clone());
                let nu = FinitelySupportedMeasure::from_descriptor(s.clone(), p.nu.clone());
                let (mu, nu) = match (mu, nu) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => return Err(CliError::Fixture(format!("pair {i}: {e}"))),
                };
                match kr_distance(&mu, &nu) {
                    Ok(r) => rows.push(serde_json::to_value(&r).expect("report serializes")),
                    Err(e) => {
                        let mut o = Outcome::new(json!({ "pairs": rows }));
                        o.record_error(&e);
                        return Ok(o);
                    }
                }
            }
            let max_gap = rows.iter().filter_map(|r| r["gap"].as_f64()).fold(0.0, f64::max);
            Ok(Outcome::new(json!({ "pairs": rows, "max_gap": max_gap })))
        }
        ScenarioKind::Supmetric { tower, stage, points, trials } => {
            let t = config::resolve_tower(tower)?;
            if *stage > t.top_index() {
                return Err(CliError::Config(format!("stage {stage} is beyond the top of the tower")));
            }
            let k = FiniteMetricSpace::discrete(*points);
            let a = t.stage(*stage).clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut max_gap: f64 = 0.0;
            let mut rows = Table::new(&["trial", "lhs", "rhs", "gap"]);
            for trial in 0..*trials {
                let f: Vec<AlgebraElement> = (0..*points).map(|_| a.random_element(&mut rng)).collect();
                let g: Vec<AlgebraElement> = (0..*points).map(|_| a.random_element(&mut rng)).collect();
                match check_sup_metric_equality(&k, &t, *stage, &f, &g) {
                    Ok(c) => {
                        max_gap = max_gap.max(c.gap);
                        rows.rows.push(vec![trial as f64, c.lhs, c.rhs, c.gap]);
                    }
                    Err(e) => return Ok(Outcome::failed(&e)),
                }
            }
            let mut o = Outcome::new(json!({ "trials": trials, "max_gap": max_gap }));
            o.tables.insert("supmetric".into(), rows);
            Ok(o)
        }
    }
}

/// Random linear map with every basis image of norm `eta`.
fn noise(source: &SemisimpleAlgebra, target: &SemisimpleAlgebra, eta: f64, seed: u64) -> LinearMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DMatrix::from_fn(target.dim(), source.dim(), |i, _| {
        let im = if target.is_real_coordinate(i) { 0.0 } else { rng.random_range(-1.0..1.0) };
        C64::new(rng.random_range(-1.0..1.0), im)
    });
    let mut m = LinearMap::from_coefficients(BasisAlgebra::Matrix(source.clone()), target.clone(), &coeffs)
        .expect("shapes match");
    let images: Vec<AlgebraElement> = m
        .images()
        .iter()
        .map(|x| {
            let n = x.operator_norm();
            if n > 0.0 {
                x.scale_real(eta / n)
            } else {
                x.clone()
            }
        })
        .collect();
    m = LinearMap::new(m.source().clone(), m.target().clone(), images).expect("shapes match");
    m
}

fn trace_summary(trace: &CorrectionTrace) -> Value {
    json!({
        "converged": trace.converged,
        "iterations": trace.iterations,
        "defect_after": trace.last_defect(),
        "distance_to_input": trace.distance_to_input,
        "stability_constant": trace.stability_constant,
        "unit_residual": trace.unit_residual,
        "quadratic_constant": trace.quadratic_constant(RATE_REGIME, DEFECT_FLOOR),
        "min_log_slope_ratio": min_log_slope_ratio(&trace.defects, RATE_REGIME, DEFECT_FLOOR),
    })
}

/// Smallest `ln d_{n+1} / ln d_n` over steps starting below `below` and
/// ending above `floor`; at least 2 for quadratic convergence up to the
/// constant.
pub fn min_log_slope_ratio(defects: &[f64], below: f64, floor: f64) -> Option<f64> {
    defects
        .windows(2)
        .filter(|w| w[0] < below && w[0] > 0.0 && w[1] > floor)
        .map(|w| w[1].ln() / w[0].ln())
        .reduce(f64::min)
}

fn conjugate(phi: &Representation, distance: f64, seed: u64) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = phi.algebra();
    let k = a.random_skew(&mut rng);
    // |exp(t k) - 1| = 2 sin(t |k| / 2) for skew-adjoint k
    let t = 2.0 * (distance / 2.0).asin() / k.operator_norm();
    let v = k.scale_real(t).exp();
    let psi = phi.conjugate(&v)?;
    let u = average_intertwiner(phi, &psi)?;
    let intertwining = phi
        .values()
        .iter()
        .zip(psi.values())
        .map(|(p, q)| (q * &u).distance(&(&u * p)))
        .fold(0.0, f64::max);
    let w = unitarize_conjugation(phi, &psi)?;
    let back = phi.conjugate(&w)?;
    Ok(Outcome::new(json!({
        "conjugator_distance": (&v - &a.identity()).operator_norm(),
        "intertwining_residual": intertwining,
        "conjugation_residual": rep_distance(&back, &psi)?,
        "unitarity_residual": w.unitarity_residual(),
    })))
}

fn geometry(
    hausdorff: &[config::HausdorffCase],
    min_expansion: &Option<config::IndexRange>,
    operator_norms: &[config::OperatorCase],
) -> Result<Outcome, CliError> {
    let fixture = |e: Error| CliError::Fixture(e.to_string());
    let mut cases = Vec::new();
    for h in hausdorff {
        let ambient = FinDimBanachSpace::new(h.ambient.clone()).map_err(fixture)?;
        let k = h.k.resolve(&ambient)?;
        let l = h.l.resolve(&ambient)?;
        match hausdorff_certificate(&k, &l, &ambient, HAUSDORFF_TOL, HAUSDORFF_BUDGET) {
            Ok(iv) => cases.push(json!({
                "lower": iv.lower,
                "upper": iv.upper,
                "expected": h.expected,
                "error": h.expected.map(|x| (iv.lower - x).abs().max((iv.upper - x).abs())),
            })),
            Err(e) => {
                let mut o = Outcome::new(json!({ "hausdorff": cases }));
                o.record_error(&e);
                return Ok(o);
            }
        }
    }
    let mut out = Outcome::new(json!({ "hausdorff": cases }));
    if let Some(r) = min_expansion {
        if r.from < 2 || r.to < r.from {
            return Err(CliError::Config(format!("min_expansion range {}..{} must start at 2 or above", r.from, r.to)));
        }
        let disk = FinDimBanachSpace::euclidean(2).map_err(fixture)?;
        let mut table = Table::new(&["i", "value", "closed_form"]);
        let mut worst: f64 = 0.0;
        let mut smallest = f64::INFINITY;
        for i in r.from..=r.to {
            let v = min_expansion_split(&disk, &polygon_space(i).map_err(fixture)?).map_err(fixture)?;
            let closed = 1.0 / (std::f64::consts::PI / (2 * i) as f64).cos();
            worst = worst.max((v - closed).abs());
            smallest = smallest.min(v);
            table.rows.push(vec![i as f64, v, closed]);
        }
        let monotone = table.rows.windows(2).all(|w| w[1][1] < w[0][1]);
        out.results["min_expansion"] = json!({
            "max_error": worst,
            "min_value": smallest,
            "decreasing": monotone,
            "rows": table.rows.len(),
        });
        out.tables.insert("min_expansion".into(), table);
    }
    let mut norms = Vec::new();
    for c in operator_norms {
        let t = config::matrix(&c.matrix)?;
        let s = FinDimBanachSpace::new(c.source.clone()).map_err(fixture)?;
        let tg = FinDimBanachSpace::new(c.target.clone()).map_err(fixture)?;
        match operator_norm_bound(&t, &s, &tg) {
            Ok(iv) => norms.push(json!({ "lower": iv.lower, "upper": iv.upper })),
            Err(e) => {
                out.record_error(&e);
                break;
            }
        }
    }
    out.results["operator_norms"] = json!(norms);
    Ok(out)
}
