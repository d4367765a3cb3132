use nalgebra::DMatrix;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::tolerance::SINGULAR;
use crate::C64;

/// Blockwise polar decomposition `x = w p` with `w` unitary and `p`
/// positive. Blocks with only real entries give real factors.
pub fn polar_decompose(x: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    let mut ws = Vec::with_capacity(x.blocks().len());
    let mut ps = Vec::with_capacity(x.blocks().len());
    for m in x.blocks() {
        let real = m.iter().all(|z| z.im == 0.0);
        let svd = m.clone().svd(true, true);
        let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(smin > SINGULAR) {
            return Err(Error::Singular { min_singular_value: smin });
        }
        let u = svd.u.expect("requested");
        let v_t = svd.v_t.expect("requested");
        let sigma = DMatrix::from_diagonal(&svd.singular_values.map(|s| C64::new(s, 0.0)));
        let mut w = &u * &v_t;
        let mut p = &v_t.adjoint() * &sigma * &v_t;
        if real {
            w.iter_mut().for_each(|z| z.im = 0.0);
            p.iter_mut().for_each(|z| z.im = 0.0);
        }
        ws.push(w);
        ps.push(p);
    }
    Ok((AlgebraElement::from_blocks(ws), AlgebraElement::from_blocks(ps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_rotation() {
        let (s, c) = 0.3f64.sin_cos();
        let x = AlgebraElement::from_real_rows(&[&[2.0 * c, -2.0 * s], &[2.0 * s, 2.0 * c]]);
        let (w, p) = polar_decompose(&x).unwrap();
        let rot = x.scale_real(0.5);
        assert!(w.distance(&rot) <= 1e-14);
        assert!(p.distance(&x.identity_like().scale_real(2.0)) <= 1e-14);
        assert!(w.block(0).iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn factors_reproduce_input() {
        let a = crate::algebra::SemisimpleAlgebra::new(vec![
            crate::algebra::Block::complex(3),
            crate::algebra::Block::real(2),
        ])
        .unwrap();
        let mut rng = rand::rng();
        let x = &a.identity().scale_real(3.0) + &a.random_element(&mut rng);
        let (w, p) = polar_decompose(&x).unwrap();
        assert!(w.is_unitary(1e-12));
        assert!((&w * &p).distance(&x) <= 1e-12 * x.operator_norm());
        assert!(p.distance(&p.adjoint()) <= 1e-12);
        assert!(a.contains(&w) && a.contains(&p));
    }

    #[test]
    fn singular_input() {
        let x = AlgebraElement::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(polar_decompose(&x), Err(Error::Singular { .. })));
    }
}
