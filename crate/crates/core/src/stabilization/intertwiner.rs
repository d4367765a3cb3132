use super::polar_decompose;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::group::Representation;
use crate::tolerance::SINGULAR;

fn check_pair(phi1: &Representation, phi2: &Representation) -> Result<()> {
    if phi1.group() != phi2.group() || phi1.algebra() != phi2.algebra() {
        return Err(Error::Precondition("representations of different groups or algebras".into()));
    }
    if !phi1.is_exact() || !phi2.is_exact() {
        return Err(Error::Precondition("both representations must be exact".into()));
    }
    Ok(())
}

/// `u = (1/|G|) sum_t phi2(t) phi1(t)^-1`, so that `phi2(s) u = u phi1(s)`.
pub fn average_intertwiner(phi1: &Representation, phi2: &Representation) -> Result<AlgebraElement> {
    check_pair(phi1, phi2)?;
    let g = phi1.group();
    let mut u = phi1.algebra().zero();
    for t in g.elements() {
        // exact reps: phi1(t)^-1 = phi1(t^-1)
        u = &u + &(phi2.value(t) * phi1.value(g.inv(t)));
    }
    let u = u.scale_real(1.0 / g.order() as f64);
    let s = u.min_singular_value();
    if !(s > SINGULAR) {
        return Err(Error::IntertwinerSingular { min_singular_value: s });
    }
    Ok(u)
}

/// Unitary `w` with `phi2 = w phi1 w*`, the polar part of the averaged
/// intertwiner.
pub fn unitarize_conjugation(phi1: &Representation, phi2: &Representation) -> Result<AlgebraElement> {
    if !phi1.is_unitary() || !phi2.is_unitary() {
        return Err(Error::Precondition("both representations must be unitary".into()));
    }
    let u = average_intertwiner(phi1, phi2)?;
    Ok(polar_decompose(&u)?.0)
}
