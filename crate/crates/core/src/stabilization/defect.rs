use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::norm_estimate::{ascent_rng, random_source_vector, LinearObjective};
use crate::algebra::{AlgebraElement, LinearMap, NormInterval};
use crate::C64;

const BILINEAR_RESTARTS: usize = 8;
const ALTERNATIONS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    /// `max |T(b b') - T(b) T(b')|` over source basis pairs.
    pub basis_defect: f64,
    /// Bounds on the norm of the bilinear defect over unit-ball pairs.
    pub norm_interval: NormInterval,
}

fn pair_defect(map: &LinearMap, i: usize, j: usize) -> AlgebraElement {
    let prod = &map.images()[i] * &map.images()[j];
    match map.source().basis_product(i, j) {
        Some(k) => &map.images()[k] - &prod,
        None => -&prod,
    }
}

/// `max_{b, b'} |T(b b') - T(b) T(b')|`.
pub fn basis_defect(map: &LinearMap) -> f64 {
    let d = map.source().dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max(pair_defect(map, i, j).operator_norm());
        }
    }
    worst
}

/// Basis defect plus an interval for `sup_{|x|,|y| <= 1} |T(xy) - T(x)T(y)|`.
///
/// The upper end bounds the bilinear form by its basis values through the
/// coefficient norms; the lower end is found by alternating ascent in `x`
/// and `y`.
pub fn bilinear_defect(map: &LinearMap) -> DefectReport {
    let src = map.source();
    let d = src.dim();
    let mut norms = DMatrix::<f64>::zeros(d, d);
    let mut best = (0.0, 0, 0);
    for i in 0..d {
        for j in 0..d {
            let v = pair_defect(map, i, j).operator_norm();
            norms[(i, j)] = v;
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let basis = best.0;
    if basis == 0.0 {
        return DefectReport { basis_defect: 0.0, norm_interval: NormInterval::exact(0.0) };
    }
    let upper = norms.singular_values().max() * d as f64;

    let mut rng = ascent_rng();
    let mut starts = vec![
        (DVector::from_vec(src.basis_vector(best.1)), DVector::from_vec(src.basis_vector(best.2))),
        (DVector::from_vec(src.unit()), DVector::from_vec(src.unit())),
    ];
    for _ in 0..BILINEAR_RESTARTS {
        let x = random_source_vector(src, &mut rng);
        let y = random_source_vector(src, &mut rng);
        starts.push((x, y));
    }
    let mut lower: f64 = 0.0;
    for (mut x, mut y) in starts {
        y /= C64::new(src.norm(y.as_slice()), 0.0);
        for _ in 0..ALTERNATIONS {
            let (_, nx) = ascend_slot(map, &y, true, x);
            x = nx;
            let (v, ny) = ascend_slot(map, &x, false, y);
            y = ny;
            lower = lower.max(v);
        }
    }
    DefectReport { basis_defect: basis, norm_interval: NormInterval { lower, upper: upper.max(lower) } }
}

/// Ascent in one argument of the defect with the other argument fixed.
/// Both arguments end normalized, so the returned value is `|T^(x, y)|`.
fn ascend_slot(map: &LinearMap, fixed: &DVector<C64>, free_is_left: bool, start: DVector<C64>) -> (f64, DVector<C64>) {
    let src = map.source();
    let tgt = map.target();
    let d = src.dim();
    let t_fixed = map.apply(fixed.as_slice());
    let mut m = DMatrix::<C64>::zeros(tgt.dim(), d);
    for k in 0..d {
        let b = src.basis_vector(k);
        let (prod, tb_tf) = if free_is_left {
            (src.mul(&b, fixed.as_slice()), map.image(k) * &t_fixed)
        } else {
            (src.mul(fixed.as_slice(), &b), &t_fixed * map.image(k))
        };
        let col = &map.apply(&prod) - &tb_tf;
        for (r, z) in tgt.coeffs(&col).into_iter().enumerate() {
            m[(r, k)] = z;
        }
    }
    LinearObjective { source: src, target: tgt, matrix: &m }.ascend(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BasisAlgebra, SemisimpleAlgebra};

    #[test]
    fn exact_morphism_has_zero_defect() {
        let id = LinearMap::identity(&SemisimpleAlgebra::matrix(2).unwrap());
        let r = bilinear_defect(&id);
        assert!(r.basis_defect <= 1e-12);
        assert!(r.norm_interval.upper <= 1e-12);
    }

    #[test]
    fn scalar_expansion() {
        let c = SemisimpleAlgebra::scalars();
        let t = LinearMap::identity(&c).scale(C64::new(1.1, 0.0));
        let r = bilinear_defect(&t);
        // T^(x, y) = -xy eta (1 + eta)
        assert!((r.basis_defect - 0.11).abs() <= 1e-14);
        assert!((r.norm_interval.lower - 0.11).abs() <= 1e-12);
        assert!((r.norm_interval.upper - 0.11).abs() <= 1e-12);
    }

    #[test]
    fn zero_map_is_multiplicative_but_not_unital() {
        let a = SemisimpleAlgebra::matrix(2).unwrap();
        let z = LinearMap::zero(BasisAlgebra::Matrix(a.clone()), a);
        assert_eq!(basis_defect(&z), 0.0);
        assert!((z.unit_residual() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_brackets_basis_value() {
        let a = SemisimpleAlgebra::matrix(2).unwrap();
        let mut rng = rand::rng();
        let mut t = LinearMap::identity(&a);
        for im in t.images_mut() {
            *im = &im.clone() + &a.random_element(&mut rng).scale_real(0.05);
        }
        let r = bilinear_defect(&t);
        assert!(r.norm_interval.lower >= r.basis_defect - 1e-12);
        assert!(r.norm_interval.lower <= r.norm_interval.upper);
    }
}
