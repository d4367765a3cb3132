use super::{basis_defect, CorrectionConfig, CorrectionTrace};
use crate::algebra::{AlgebraElement, Diagonal, LinearMap};
use crate::error::{Error, Result};

/// Unit residual above which a multiplicative limit is reported as
/// non-unital rather than converged. Idempotents other than 1 sit at
/// distance at least 1 from the unit.
const NON_UNITAL_RESIDUAL: f64 = 0.5;

/// One averaging step: `Psi + psi` with
/// `psi(x) = sum_l Psi(e'_l) (Psi(e''_l x) - Psi(e''_l) Psi(x))`.
pub(crate) fn newton_step(map: &LinearMap, diag: &Diagonal) -> LinearMap {
    let src = map.source();
    let left: Vec<AlgebraElement> = diag.pairs().iter().map(|(l, _)| map.apply(l)).collect();
    let mut p = map.target().zero();
    for ((_, r), tl) in diag.pairs().iter().zip(&left) {
        p = &p + &(tl * &map.apply(r));
    }
    let mut next = map.clone();
    for (k, out) in next.images_mut().iter_mut().enumerate() {
        let b = src.basis_vector(k);
        let mut acc = -&(&p * map.image(k));
        for ((_, r), tl) in diag.pairs().iter().zip(&left) {
            let rb = src.mul(r, &b);
            if rb.iter().any(|z| z.norm_sqr() != 0.0) {
                acc = &acc + &(tl * &map.apply(&rb));
            }
        }
        *out = &*out + &acc;
    }
    next
}

/// Runs the averaging iteration with the default [`CorrectionConfig`]
/// apart from `tol` and `max_iter`.
pub fn newton_correct(map: &LinearMap, diag: &Diagonal, tol: f64, max_iter: usize) -> Result<CorrectionTrace> {
    let config = CorrectionConfig { tol, max_iter, ..CorrectionConfig::default() };
    newton_correct_with(map, diag, &config, |_| {})
}

/// Iterates `Psi_{n+1} = Psi_n + psi_{n+1}` until the basis defect is at
/// most `config.tol`. `retract` runs on every new iterate before its defect
/// is measured.
pub fn newton_correct_with(
    map: &LinearMap,
    diag: &Diagonal,
    config: &CorrectionConfig,
    mut retract: impl FnMut(&mut LinearMap),
) -> Result<CorrectionTrace> {
    if !(config.tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if config.max_iter == 0 {
        return Err(Error::Precondition("max_iter must be at least 1".into()));
    }
    let mut current = map.clone();
    let mut defects = vec![basis_defect(&current)];
    let mut rises = 0;
    loop {
        let last = *defects.last().expect("non-empty");
        let iterations = defects.len() - 1;
        let finish = |m: LinearMap, defects: Vec<f64>, converged: bool| -> CorrectionTrace {
            CorrectionTrace {
                iterations,
                converged,
                distance_to_input: m.basis_distance(map).expect("same spaces"),
                stability_constant: (defects[0] > 0.0)
                    .then(|| m.basis_distance(map).expect("same spaces") / defects[0]),
                unit_residual: m.unit_residual(),
                defects,
                map: m,
            }
        };
        if last <= config.tol {
            let trace = finish(current, defects, true);
            if trace.unit_residual > NON_UNITAL_RESIDUAL {
                return Err(Error::NonUnital { residual: trace.unit_residual });
            }
            return Ok(trace);
        }
        if !last.is_finite() || rises >= config.divergence_window {
            return Err(Error::Diverged { trace: Box::new(finish(current, defects, false)) });
        }
        if iterations >= config.max_iter {
            return Err(Error::NotConverged { trace: Box::new(finish(current, defects, false)) });
        }
        current = newton_step(&current, diag);
        retract(&mut current);
        let d = basis_defect(&current);
        rises = if d > last { rises + 1 } else { 0 };
        defects.push(d);
    }
}
