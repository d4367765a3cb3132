use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabilize_core::algebra::{diagonal, BasisAlgebra, Field, LinearMap, SemisimpleAlgebra};
use stabilize_core::colimit::{af_embedding, AfStep, Multiplicities};
use stabilize_core::group::{rep_distance, FiniteGroup, Representation};
use stabilize_core::stabilization::{
    average_intertwiner, basis_defect, haar_correct, newton_correct, self_adjoint_part, CorrectionConfig,
};
use stabilize_core::{Error, C64};

fn random_map(a: &SemisimpleAlgebra, b: &SemisimpleAlgebra, rng: &mut ChaCha8Rng, size: f64) -> LinearMap {
    let coeffs = DMatrix::from_fn(b.dim(), a.dim(), |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = LinearMap::from_coefficients(BasisAlgebra::Matrix(a.clone()), b.clone(), &coeffs).unwrap();
    let worst = m.images().iter().map(|x| x.operator_norm()).fold(0.0, f64::max);
    m.scale(C64::new(size / worst, 0.0))
}

#[test]
fn noisy_block_embedding_is_corrected() {
    let m2 = SemisimpleAlgebra::matrix(2).unwrap();
    let m4 = SemisimpleAlgebra::matrix(4).unwrap();
    let emb = af_embedding(&m2, &AfStep::Pattern(Multiplicities::Flat(vec![2.0]))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noisy = emb.add(&random_map(&m2, &m4, &mut rng, 0.01)).unwrap();
    let trace = newton_correct(&noisy, &diagonal(&m2), 1e-12, 8).unwrap();
    assert!(trace.converged);
    assert!(trace.iterations <= 8);
    assert!(basis_defect(&trace.map) <= 1e-12);
    assert!(trace.map.basis_distance(&emb).unwrap() <= 0.1);
    assert!(trace.unit_residual <= 1e-10);
}

/// Scalar maps `z -> c z` on the complex numbers: the recursion converges
/// for initial defects below the admissibility threshold and fails well
/// above it.
#[test]
fn admissibility_threshold_sweep() {
    let c = SemisimpleAlgebra::scalars();
    let e = diagonal(&c);
    for c0 in [0.85, 0.9, 1.05, 1.1, 1.15] {
        let t = LinearMap::identity(&c).scale(C64::new(c0, 0.0));
        assert!(basis_defect(&t) <= CorrectionConfig::default().admissible_defect);
        assert!(newton_correct(&t, &e, 1e-14, 50).unwrap().converged, "{c0}");
    }
    for c0 in [2.5, 3.0, 4.0] {
        let t = LinearMap::identity(&c).scale(C64::new(c0, 0.0));
        assert!(basis_defect(&t) > CorrectionConfig::default().admissible_defect);
        assert!(newton_correct(&t, &e, 1e-14, 50).is_err(), "{c0}");
    }
}

#[test]
fn haar_output_is_exact_on_every_pair() {
    for name in ["Z6", "S3", "D4", "Q8"] {
        let g = Arc::new(FiniteGroup::builtin(name).unwrap());
        let phi = Representation::regular(g.clone(), Field::Complex).perturb(0.01, 5).unwrap();
        let (exact, _) = haar_correct(&phi, &CorrectionConfig::default()).unwrap();
        for s in g.elements() {
            for t in g.elements() {
                let lhs = exact.value(g.mul(s, t));
                let rhs = exact.value(s) * exact.value(t);
                assert!(lhs.distance(&rhs) <= 1e-10, "{name}");
            }
        }
        assert!(exact.is_unitary());
    }
}

#[test]
fn intertwining_holds_for_distant_exact_pairs() {
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let phi = Representation::regular(g.clone(), Field::Complex);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = SemisimpleAlgebra::matrix(6).unwrap();
    for _ in 0..5 {
        // far from the identity, so the average may be singular
        let v = a.random_skew(&mut rng).scale_real(2.0).exp();
        let psi = phi.conjugate(&v).unwrap();
        let u = match average_intertwiner(&phi, &psi) {
            Ok(u) => u,
            Err(Error::IntertwinerSingular { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        for s in g.elements() {
            let lhs = psi.value(s) * &u;
            let rhs = &u * phi.value(s);
            assert!(lhs.distance(&rhs) <= 1e-10);
        }
    }
    assert!(rep_distance(&phi, &phi).unwrap() == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn self_adjoint_part_is_idempotent(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SemisimpleAlgebra::matrix(n).unwrap();
        let b = SemisimpleAlgebra::matrix(m).unwrap();
        let t = random_map(&a, &b, &mut rng, 1.0);
        let once = self_adjoint_part(&t);
        let twice = self_adjoint_part(&once);
        prop_assert!(once.basis_distance(&twice).unwrap() <= 1e-14);
    }

    #[test]
    fn multiplicative_maps_are_fixed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m3 = SemisimpleAlgebra::matrix(3).unwrap();
        let u = m3.random_skew(&mut rng).exp();
        let ui = u.inverse().unwrap();
        let images = (0..m3.dim()).map(|i| &(&u * &m3.basis_element(i)) * &ui).collect();
        let conj = LinearMap::new(BasisAlgebra::Matrix(m3.clone()), m3.clone(), images).unwrap();
        prop_assume!(basis_defect(&conj) <= 1e-13);
        let trace = newton_correct(&conj, &diagonal(&m3), 1e-13, 5).unwrap();
        prop_assert_eq!(trace.iterations, 0);
        prop_assert_eq!(trace.map, conj);
    }
}
