use super::{basis_defect, newton_correct_with, polar_decompose, self_adjoint_part, CorrectionConfig, CorrectionTrace};
use crate::algebra::group_algebra;
use crate::error::{Error, Result};
use crate::group::{rep_distance, restrict_to_group, Representation};

/// Corrects an approximate representation to an exact one by running the
/// averaging iteration on the group algebra and restricting back to the
/// group. In unitary mode every iterate is symmetrized and its values are
/// retracted to the unitaries.
pub fn haar_correct(phi: &Representation, config: &CorrectionConfig) -> Result<(Representation, CorrectionTrace)> {
    let defect = phi.defect();
    if !(defect <= config.admissible_defect) {
        return Err(Error::Inadmissible { defect, threshold: config.admissible_defect });
    }
    let (_, diag) = group_algebra(phi.group().clone());
    let start = phi.linearize();
    if phi.is_exact() || basis_defect(&start) <= config.tol {
        let trace = CorrectionTrace {
            iterations: 0,
            defects: vec![basis_defect(&start)],
            converged: true,
            distance_to_input: 0.0,
            stability_constant: (defect > 0.0).then_some(0.0),
            unit_residual: start.unit_residual(),
            map: start,
        };
        return Ok((phi.clone(), trace));
    }
    let unitary = config.unitary.unwrap_or(phi.is_unitary());
    let mut trace = if unitary {
        newton_correct_with(&start, &diag, config, |m| {
            *m = self_adjoint_part(m);
            for im in m.images_mut() {
                if let Ok((w, _)) = polar_decompose(im) {
                    *im = w;
                }
            }
        })?
    } else {
        newton_correct_with(&start, &diag, config, |_| {})?
    };
    let corrected = restrict_to_group(&trace.map, phi.group())?;
    let dist = rep_distance(&corrected, phi)?;
    trace.distance_to_input = dist;
    trace.stability_constant = (defect > 0.0).then(|| dist / defect);
    Ok((corrected, trace))
}
