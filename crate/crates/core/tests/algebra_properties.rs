use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabilize_core::algebra::{group_algebra, Block, BasisAlgebra, Diagonal, LinearMap, SemisimpleAlgebra};
use stabilize_core::group::FiniteGroup;
use stabilize_core::C64;

fn algebras() -> Vec<SemisimpleAlgebra> {
    vec![
        SemisimpleAlgebra::scalars(),
        SemisimpleAlgebra::matrix(2).unwrap(),
        SemisimpleAlgebra::matrix(3).unwrap(),
        SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(3)]).unwrap(),
        SemisimpleAlgebra::new(vec![Block::real(2), Block::complex(1)]).unwrap(),
    ]
}

#[test]
fn operator_norm_is_submultiplicative_and_unital() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for a in algebras() {
        assert!((a.identity().operator_norm() - 1.0).abs() <= 1e-12);
        for _ in 0..1000 {
            let x = a.random_element(&mut rng);
            let y = a.random_element(&mut rng);
            let xy = &x * &y;
            assert!(xy.operator_norm() <= x.operator_norm() * y.operator_norm() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn every_diagonal_satisfies_its_identities() {
    let mut bases: Vec<BasisAlgebra> = algebras().into_iter().map(BasisAlgebra::Matrix).collect();
    for name in ["Z2", "Z6", "S3", "D4", "Q8", "S4"] {
        bases.push(group_algebra(Arc::new(FiniteGroup::builtin(name).unwrap())).0);
    }
    for b in &bases {
        let e = Diagonal::canonical(b);
        assert!(e.multiplication_residual(b) <= 1e-12);
        assert!(e.commutation_residual(b) <= 1e-12);
    }
}

fn random_map(a: &SemisimpleAlgebra, b: &SemisimpleAlgebra, seed: u64) -> LinearMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DMatrix::from_fn(b.dim(), a.dim(), |i, _| {
        let re = rng.random_range(-1.0..1.0);
        let im = if b.is_real_coordinate(i) { 0.0 } else { rng.random_range(-1.0..1.0) };
        C64::new(re, im)
    });
    LinearMap::from_coefficients(BasisAlgebra::Matrix(a.clone()), b.clone(), &coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_interval_is_ordered(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        let algs = algebras();
        let n = random_map(&algs[i], &algs[j], seed).norm_estimate_with_restarts(2);
        prop_assert!(n.lower <= n.upper * (1.0 + 1e-12));
        prop_assert!(n.lower >= 0.0);
    }

    #[test]
    fn scaled_block_projection_norm_is_the_scale(t in 0.01f64..10.0) {
        let src = SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(1)]).unwrap();
        let tgt = SemisimpleAlgebra::matrix(2).unwrap();
        let images = (0..src.dim())
            .map(|i| if i < 4 { tgt.basis_element(i).scale_real(t) } else { tgt.zero() })
            .collect();
        let p = LinearMap::new(BasisAlgebra::Matrix(src), tgt, images).unwrap();
        let n = p.norm_estimate();
        prop_assert!((n.lower - t).abs() <= 1e-6 * t, "{:?}", n);
    }
}
