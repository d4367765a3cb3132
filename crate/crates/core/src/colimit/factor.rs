use serde::{Deserialize, Serialize};

use super::{Pullback, Tower, TowerKind};
use crate::error::{Error, Result};
use crate::group::{rep_distance, Representation};
use crate::stabilization::{haar_correct, CorrectionConfig};

/// Outcome of [`factor_through_stage`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub stage: usize,
    pub epsilon: f64,
    /// `rep_distance(iota_i o phi_i, phi)`.
    pub distance: f64,
    /// Defect of the projected candidate before correction.
    pub defect_before: f64,
    pub defect_after: f64,
    pub iterations: usize,
}

/// Finds the first stage `i` of an isometric tower through which `phi`
/// factors up to `epsilon`: every `phi(g)` is within `epsilon / 2` of the
/// image of `A_i`, the projected candidate is admissible for correction,
/// and the corrected exact representation pushes forward to within
/// `epsilon` of `phi`.
///
/// Only proper stages `0..N` are searched (the whole tower when `N = 0`),
/// since the last stage factors every representation trivially.
pub fn factor_through_stage(
    phi: &Representation,
    tower: &Tower,
    epsilon: f64,
    config: &CorrectionConfig,
) -> Result<(Representation, FactorReport)> {
    if tower.kind() != TowerKind::Isometric {
        return Err(Error::Precondition("factorization needs an isometric tower".into()));
    }
    if phi.algebra() != tower.top() {
        return Err(Error::ShapeMismatch("representation does not land in the top stage".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let defect = phi.defect();
    if !(defect <= config.admissible_defect) {
        return Err(Error::Inadmissible { defect, threshold: config.admissible_defect });
    }
    let mut downstream: Option<Error> = None;
    for i in 0..tower.top_index().max(1) {
        let pull = Pullback::new(tower.structure_map(i)?);
        let mut values = Vec::with_capacity(phi.values().len());
        let mut residual: f64 = 0.0;
        for v in phi.values() {
            let a = pull.preimage(v);
            residual = residual.max(pull.map().apply_element(&a)?.distance(v));
            values.push(a);
        }
        if !(residual <= epsilon / 2.0) {
            continue;
        }
        let candidate = match Representation::new(phi.group().clone(), tower.stage(i).clone(), values) {
            Ok(c) => c,
            Err(e) => {
                downstream = Some(e);
                continue;
            }
        };
        let (exact, trace) = match haar_correct(&candidate, config) {
            Ok(r) => r,
            Err(e) => {
                downstream = Some(e);
                continue;
            }
        };
        let distance = rep_distance(&exact.push_forward(pull.map())?, phi)?;
        if distance <= epsilon {
            let report = FactorReport {
                stage: i,
                epsilon,
                distance,
                defect_before: candidate.defect(),
                defect_after: exact.defect(),
                iterations: trace.iterations,
            };
            return Ok((exact, report));
        }
    }
    Err(downstream.unwrap_or(Error::StageNotFound { epsilon }))
}
