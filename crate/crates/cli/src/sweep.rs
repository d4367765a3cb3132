//! Parameter sweeps written as CSV tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stabilize_core::banach::{min_expansion_split, polygon_space, FinDimBanachSpace};
use stabilize_core::group::rep_distance;
use stabilize_core::stabilization::{haar_correct, CorrectionConfig};

use crate::config::{check_eta, GroupRef, RepFixture};
use crate::report::Table;
use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    /// Haar correction distance as a function of the perturbation size.
    Eta {
        name: String,
        group: GroupRef,
        rep: RepFixture,
        etas: Vec<f64>,
        seeds: Vec<u64>,
        #[serde(default)]
        correction: CorrectionConfig,
    },
    /// Norm of the identity from the disk to the regular polygons.
    MinExpansion { name: String, from: usize, to: usize },
}

impl SweepConfig {
    pub fn name(&self) -> &str {
        match self {
            SweepConfig::Eta { name, .. } | SweepConfig::MinExpansion { name, .. } => name,
        }
    }
}

/// Runs the sweep. Failed points are kept as rows with NaN results and
/// counted in the second return value.
pub fn run_sweep(config: &SweepConfig) -> Result<(Table, usize), CliError> {
    match config {
        SweepConfig::Eta { group, rep, etas, seeds, correction, .. } => {
            for &eta in etas {
                check_eta(eta)?;
            }
            let g = group.resolve()?;
            let phi = rep.resolve(&g)?;
            let points: Vec<(f64, u64)> = etas.iter().flat_map(|&e| seeds.iter().map(move |&s| (e, s))).collect();
            let rows: Vec<Option<Vec<f64>>> = points
                .par_iter()
                .map(|&(eta, seed)| {
                    let p = phi.perturb(eta, seed).ok()?;
                    let (exact, trace) = haar_correct(&p, correction).ok()?;
                    let d = rep_distance(&exact, &p).ok()?;
                    Some(vec![eta, seed as f64, d, p.defect(), trace.iterations as f64])
                })
                .collect();
            let mut table = Table::new(&["eta", "seed", "distance", "defect_before", "iterations"]);
            let mut failed = 0;
            for ((eta, seed), row) in points.iter().zip(rows) {
                table.rows.push(row.unwrap_or_else(|| {
                    failed += 1;
                    vec![*eta, *seed as f64, f64::NAN, f64::NAN, f64::NAN]
                }));
            }
            Ok((table, failed))
        }
        SweepConfig::MinExpansion { from, to, .. } => {
            if *from < 2 || to < from {
                return Err(CliError::Config(format!("range {from}..{to} must start at 2 or above")));
            }
            let disk = FinDimBanachSpace::euclidean(2).expect("plane");
            let rows: Vec<Option<Vec<f64>>> = (*from..=*to)
                .into_par_iter()
                .map(|i| {
                    let v = min_expansion_split(&disk, &polygon_space(i).ok()?).ok()?;
                    let closed = 1.0 / (std::f64::consts::PI / (2 * i) as f64).cos();
                    Some(vec![i as f64, v, closed])
                })
                .collect();
            let mut table = Table::new(&["i", "value", "closed_form"]);
            let mut failed = 0;
            for (i, row) in (*from..=*to).zip(rows) {
                table.rows.push(row.unwrap_or_else(|| {
                    failed += 1;
                    vec![i as f64, f64::NAN, f64::NAN]
                }));
            }
            Ok((table, failed))
        }
    }
}
