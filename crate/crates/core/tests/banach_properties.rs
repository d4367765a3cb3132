use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stabilize_core::banach::{
    graph_approximate, hausdorff_distance_balls, min_expansion_split, polygon_space, FinDimBanachSpace, SubspaceGraph,
    UnitBall,
};

fn random_ball(rng: &mut ChaCha8Rng, ambient: &FinDimBanachSpace) -> UnitBall {
    match rng.random_range(0..4) {
        0 => {
            let p = [1.0, 1.5, 2.0, 3.0, f64::INFINITY][rng.random_range(0..5)];
            let s = FinDimBanachSpace::lp(2, p).unwrap();
            let scale = rng.random_range(0.5..2.0);
            UnitBall::new(DMatrix::identity(2, 2) * scale, s).unwrap()
        }
        1 => {
            let a: DMatrix<f64> = DMatrix::from_fn(2, 2, |_, _| rng.sample(StandardNormal));
            let form = &a * a.transpose() + DMatrix::identity(2, 2) * 0.3;
            let rows = (0..2).map(|i| (0..2).map(|j| form[(i, j)]).collect()).collect();
            UnitBall::of_space(&FinDimBanachSpace::ellipsoid(rows).unwrap())
        }
        2 => UnitBall::of_space(&polygon_space(rng.random_range(2..9)).unwrap()),
        _ => {
            let dir = DMatrix::from_fn(2, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
            UnitBall::induced(ambient, dir.normalize()).unwrap()
        }
    }
}

#[test]
fn hausdorff_distance_is_a_metric_on_planar_balls() {
    let ambient = FinDimBanachSpace::euclidean(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let (a, b, c) = (random_ball(&mut rng, &ambient), random_ball(&mut rng, &ambient), random_ball(&mut rng, &ambient));
        let d = |x: &UnitBall, y: &UnitBall| hausdorff_distance_balls(x, y, &ambient).unwrap();
        let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
        assert!(d(&a, &a) <= 1e-5);
        assert!((ab - d(&b, &a)).abs() <= 1e-5);
        assert!(ac <= ab + bc + 1e-5, "{ac} > {ab} + {bc}");
    }
}

#[test]
fn min_expansion_decreases_towards_one() {
    let e = FinDimBanachSpace::euclidean(2).unwrap();
    let mut last = f64::INFINITY;
    for i in 2..=12 {
        let v = min_expansion_split(&e, &polygon_space(i).unwrap()).unwrap();
        let closed = 1.0 / (std::f64::consts::PI / (2 * i) as f64).cos();
        assert!((v - closed).abs() <= 1e-6);
        assert!(v > 1.0 && v < last);
        last = v;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_round_trip(seed in any::<u64>(), d in 2usize..6, k in 1usize..3) {
        prop_assume!(k < d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = FinDimBanachSpace::lp(d, 1.5).unwrap();
        let base = DMatrix::from_fn(d, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let l = DMatrix::from_fn(d - k, k, |_, _| 0.5 * rng.sample::<f64, _>(StandardNormal));
        let g = SubspaceGraph::over(ambient.clone(), &base, l.clone()).unwrap();
        let back = graph_approximate(&ambient, &base, &g.graph_basis()).unwrap();
        prop_assert!((back.operator() - &l).amax() <= 1e-10);
    }
}
