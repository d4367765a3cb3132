use crate::algebra::LinearMap;
use crate::C64;

/// `(T + T*) / 2` where `T*(x) = T(x*)*`.
pub fn self_adjoint_part(map: &LinearMap) -> LinearMap {
    let src = map.source();
    let mut out = map.clone();
    for (i, im) in out.images_mut().iter_mut().enumerate() {
        let star = map.image(src.basis_star(i)).adjoint();
        *im = (&*im + &star).scale(C64::new(0.5, 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SemisimpleAlgebra;

    #[test]
    fn idempotent_and_fixes_star_maps() {
        let a = SemisimpleAlgebra::matrix(2).unwrap();
        let id = LinearMap::identity(&a);
        assert_eq!(self_adjoint_part(&id), id);
        let mut t = id.clone();
        let mut rng = rand::rng();
        for im in t.images_mut() {
            *im = &im.clone() + &a.random_element(&mut rng).scale_real(0.1);
        }
        let s = self_adjoint_part(&t);
        assert!(self_adjoint_part(&s).basis_distance(&s).unwrap() <= 1e-15);
        // imaginary unit is mapped to its own negated adjoint
        let half_i = self_adjoint_part(&id.scale(C64::new(0.0, 1.0)));
        assert!(half_i.images().iter().all(|m| m.max_abs_entry() == 0.0));
    }
}
