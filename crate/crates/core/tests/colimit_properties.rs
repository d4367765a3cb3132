use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabilize_core::algebra::{AlgebraElement, Block, Field, SemisimpleAlgebra};
use stabilize_core::colimit::{
    build_af_tower, build_surjective_tower, factor_through_stage, lift_along_surjections, AfStep, Multiplicities, Tower,
};
use stabilize_core::group::{rep_distance, FiniteGroup, Representation};
use stabilize_core::stabilization::CorrectionConfig;
use stabilize_core::C64;

fn doubling_tower() -> Tower {
    let step = AfStep::Pattern(Multiplicities::Flat(vec![2.0]));
    build_af_tower(SemisimpleAlgebra::matrix(2).unwrap(), &[step.clone(), step]).unwrap()
}

fn z3_in_m2() -> Representation {
    let g = Arc::new(FiniteGroup::cyclic(3));
    let m2 = SemisimpleAlgebra::matrix(2).unwrap();
    let rot = Representation::cyclic_rotation(g.clone()).unwrap();
    Representation::new(g, m2, rot.values().to_vec()).unwrap()
}

#[test]
fn hom_space_map_is_isometric() {
    let t = doubling_tower();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let m2 = SemisimpleAlgebra::matrix(2).unwrap();
    let base = Representation::trivial(g, m2);
    for _ in 0..20 {
        let a = base.perturb(rng.random_range(0.0..0.5), rng.random()).unwrap();
        let b = base.perturb(rng.random_range(0.0..0.5), rng.random()).unwrap();
        for i in 0..=t.top_index() {
            let up = t.connecting(0, i).unwrap();
            let d0 = rep_distance(&a, &b).unwrap();
            let di = rep_distance(&a.push_forward(&up).unwrap(), &b.push_forward(&up).unwrap()).unwrap();
            assert!((d0 - di).abs() <= 1e-10);
        }
    }
}

#[test]
fn factorization_invariants() {
    let t = doubling_tower();
    let config = CorrectionConfig::default();
    for seed in 0..10 {
        let phi = z3_in_m2().push_forward(&t.structure_map(0).unwrap()).unwrap().perturb(0.005, seed).unwrap();
        let eps = 0.1;
        let (exact, report) = factor_through_stage(&phi, &t, eps, &config).unwrap();
        assert_eq!(report.stage, 0);
        assert!(exact.defect() <= 1e-10);
        let pushed = exact.push_forward(&t.structure_map(report.stage).unwrap()).unwrap();
        assert!(rep_distance(&pushed, &phi).unwrap() <= eps);
        // an isometric tower gives no exact factorization of a perturbed input
        assert!(report.distance > 0.0);
    }
}

fn rotation_plus_one(g: Arc<FiniteGroup>) -> Representation {
    let rot = Representation::cyclic_rotation(g.clone()).unwrap();
    let values = rot
        .values()
        .iter()
        .map(|v| {
            let mut m = DMatrix::<C64>::identity(3, 3);
            m.view_mut((0, 0), (2, 2)).copy_from(v.block(0));
            AlgebraElement::from_matrix(m)
        })
        .collect();
    Representation::new(g, SemisimpleAlgebra::matrix(3).unwrap(), values).unwrap()
}

#[test]
fn surjective_lifts_are_exact() {
    let onto_m2 =
        build_surjective_tower(SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(2)]).unwrap(), &[vec![0]])
            .unwrap();
    let onto_m3 =
        build_surjective_tower(SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(3)]).unwrap(), &[vec![1]])
            .unwrap();
    let m2 = SemisimpleAlgebra::matrix(2).unwrap();
    let mut cases = Vec::new();
    for n in [2, 3, 4, 6] {
        let g = Arc::new(FiniteGroup::cyclic(n));
        let rot = Representation::cyclic_rotation(g.clone()).unwrap();
        cases.push((&onto_m2, Representation::new(g.clone(), m2.clone(), rot.values().to_vec()).unwrap()));
        cases.push((&onto_m3, rotation_plus_one(g)));
    }
    let z3 = Arc::new(FiniteGroup::cyclic(3));
    let reg = Representation::regular(z3.clone(), Field::Complex);
    cases.push((&onto_m3, Representation::new(z3, SemisimpleAlgebra::matrix(3).unwrap(), reg.values().to_vec()).unwrap()));
    for (t, phi) in cases {
        assert!(phi.is_exact());
        let (lift, report) = lift_along_surjections(&phi, t, 1e-8, &CorrectionConfig::default()).unwrap();
        assert!(report.residual <= 1e-8);
        assert!(lift.defect() <= 1e-10);
        let down = lift.push_forward(&t.structure_map(0).unwrap()).unwrap();
        assert!(rep_distance(&down, &phi).unwrap() <= 1e-8);
    }
}
