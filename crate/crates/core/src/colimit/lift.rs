use serde::{Deserialize, Serialize};

use super::{Pullback, Tower, TowerKind};
use crate::error::{Error, Result};
use crate::group::{rep_distance, Representation};
use crate::stabilization::{average_intertwiner, haar_correct, polar_decompose, CorrectionConfig};

/// Conjugators at or beyond this distance from 1 are refused: the lifted
/// conjugator is only guaranteed invertible below it.
const CONJUGATOR_LIMIT: f64 = 0.5;

/// Outcome of [`lift_along_surjections`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub stage: usize,
    /// `|u - 1|` for the conjugator `u` with `iota_i o phi_i = u phi u^-1`.
    pub conjugator_distance: f64,
    /// `rep_distance(iota_i o lift, phi)`.
    pub residual: f64,
    pub unitary: bool,
}

/// Lifts an exact representation into the top of a surjective tower to an
/// exact representation into stage 0 whose push-forward is `phi` itself.
///
/// The candidate lift is `s(phi(g) - 1) + 1` with `s` the least-squares
/// section of the structure map. It is corrected, compared with `phi`
/// through the averaged intertwiner `u`, and conjugated back by a lift of
/// `u` (its polar part in unitary mode).
pub fn lift_along_surjections(
    phi: &Representation,
    tower: &Tower,
    tol: f64,
    config: &CorrectionConfig,
) -> Result<(Representation, LiftReport)> {
    check(phi, tower)?;
    let stage = 0;
    let pull = Pullback::new(tower.structure_map(stage)?);
    let one_top = tower.top().identity();
    let one = tower.stage(stage).identity();
    let values = phi.values().iter().map(|v| &pull.preimage(&(v - &one_top)) + &one).collect();
    let candidate = Representation::new(phi.group().clone(), tower.stage(stage).clone(), values)?;
    lift_from(phi, tower, stage, &candidate, &pull, tol, config)
}

/// [`lift_along_surjections`] with a caller-supplied candidate at `stage`.
pub fn lift_with_candidate(
    phi: &Representation,
    tower: &Tower,
    stage: usize,
    candidate: &Representation,
    tol: f64,
    config: &CorrectionConfig,
) -> Result<(Representation, LiftReport)> {
    check(phi, tower)?;
    if stage > tower.top_index() || candidate.algebra() != tower.stage(stage) {
        return Err(Error::ShapeMismatch("candidate does not land in the given stage".into()));
    }
    let pull = Pullback::new(tower.structure_map(stage)?);
    lift_from(phi, tower, stage, candidate, &pull, tol, config)
}

fn check(phi: &Representation, tower: &Tower) -> Result<()> {
    if tower.kind() != TowerKind::Surjective {
        return Err(Error::Precondition("lifting needs a surjective tower".into()));
    }
    if phi.algebra() != tower.top() {
        return Err(Error::ShapeMismatch("representation does not land in the top stage".into()));
    }
    if !phi.is_exact() {
        return Err(Error::Precondition("only exact representations are lifted".into()));
    }
    Ok(())
}

fn lift_from(
    phi: &Representation,
    tower: &Tower,
    stage: usize,
    candidate: &Representation,
    pull: &Pullback,
    tol: f64,
    config: &CorrectionConfig,
) -> Result<(Representation, LiftReport)> {
    let (exact, _) = haar_correct(candidate, config)?;
    let unitary = config.unitary.unwrap_or(phi.is_unitary() && exact.is_unitary());
    let pushed = exact.push_forward(pull.map())?;
    let u = average_intertwiner(phi, &pushed)?;
    let distance = u.distance(&u.identity_like());
    if !(distance < CONJUGATOR_LIMIT) {
        return Err(Error::ConjugatorTooFar { distance });
    }
    let one = tower.stage(stage).identity();
    let mut u_lift = &pull.preimage(&(&u - &u.identity_like())) + &one;
    if unitary {
        u_lift = polar_decompose(&u_lift)?.0;
    }
    let inv = u_lift.inverse()?;
    let values = exact.values().iter().map(|v| &(&inv * v) * &u_lift).collect();
    let lifted = Representation::new(phi.group().clone(), tower.stage(stage).clone(), values)?;
    let residual = rep_distance(&lifted.push_forward(pull.map())?, phi)?;
    if !(residual <= tol) {
        return Err(Error::LiftResidual { residual, tol });
    }
    Ok((lifted, LiftReport { stage, conjugator_distance: distance, residual, unitary }))
}
