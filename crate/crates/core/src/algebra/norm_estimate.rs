//! Certified intervals for the operator norm of a linear map between
//! algebras, both carrying their C*-norms.
//!
//! The lower end is the best value found by projected gradient ascent of
//! `|T x|` over the source unit sphere; it is attained by an explicit `x`.
//! The upper end bounds `|T x| <= |T x|_F <= |M|_2 |x|_2 <= |M|_2 sqrt(dim) |x|`
//! where `M` is the coefficient array of `T`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BasisAlgebra, SemisimpleAlgebra};
use crate::C64;

pub(crate) const DEFAULT_RESTARTS: usize = 32;
const ASCENT_SEED: u64 = 0x5eed_a5ce;
const MAX_ASCENT_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormInterval {
    pub lower: f64,
    pub upper: f64,
}

impl NormInterval {
    pub fn exact(v: f64) -> Self {
        NormInterval { lower: v, upper: v }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

/// Objective `|M x|_target / |x|_source` and its ascent direction.
pub(crate) struct LinearObjective<'a> {
    pub source: &'a BasisAlgebra,
    pub target: &'a SemisimpleAlgebra,
    pub matrix: &'a DMatrix<C64>,
}

impl LinearObjective<'_> {
    fn value(&self, x: &DVector<C64>) -> f64 {
        let sn = self.source.norm(x.as_slice());
        if sn == 0.0 {
            return 0.0;
        }
        let y = self.matrix * x;
        self.target.element_from_coeffs(y.as_slice()).operator_norm() / sn
    }

    /// Supergradient of `x -> |M x|` at `x`: `M^H` applied to `u v^H`, the
    /// top singular pair of the maximizing block.
    fn gradient(&self, x: &DVector<C64>) -> DVector<C64> {
        let y = self.matrix * x;
        let el = self.target.element_from_coeffs(y.as_slice());
        let mut best = (0.0, 0, DMatrix::<C64>::zeros(0, 0));
        for (b, m) in el.blocks().iter().enumerate() {
            let svd = m.clone().svd(true, true);
            let (k, &s) = svd
                .singular_values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty block");
            if s >= best.0 {
                let u = svd.u.as_ref().expect("u").column(k).into_owned();
                let vt = svd.v_t.as_ref().expect("v_t").row(k).into_owned();
                best = (s, b, &u * &vt);
            }
        }
        let (_, block, g) = best;
        let mut gt = DVector::zeros(self.target.dim());
        let off = self.target.block_offset(block);
        let n = g.nrows();
        for r in 0..n {
            for c in 0..n {
                gt[off + r * n + c] = g[(r, c)];
            }
        }
        let mut grad = self.matrix.adjoint() * gt;
        for (i, z) in grad.iter_mut().enumerate() {
            if self.source.is_real_coordinate(i) {
                z.im = 0.0;
            }
        }
        grad
    }

    /// Projected gradient ascent with backtracking from `x0`.
    pub fn ascend(&self, x0: DVector<C64>) -> (f64, DVector<C64>) {
        let mut x = normalize(self.source, x0);
        let mut val = self.value(&x);
        let mut step = 1.0;
        for _ in 0..MAX_ASCENT_STEPS {
            let g = self.gradient(&x);
            let gn = g.norm();
            if gn == 0.0 {
                break;
            }
            let scale = x.norm() / gn;
            let mut improved = false;
            while step > 1e-12 {
                let trial = normalize(self.source, &x + &g * C64::new(step * scale, 0.0));
                let tv = self.value(&trial);
                if tv > val {
                    let gain = tv - val;
                    x = trial;
                    val = tv;
                    improved = gain > 1e-15 * val.max(1.0);
                    step = (step * 2.0).min(4.0);
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (val, x)
    }
}

fn normalize(source: &BasisAlgebra, x: DVector<C64>) -> DVector<C64> {
    let n = source.norm(x.as_slice());
    if n > 0.0 {
        x / C64::new(n, 0.0)
    } else {
        x
    }
}

pub(crate) fn random_source_vector<R: Rng + ?Sized>(source: &BasisAlgebra, rng: &mut R) -> DVector<C64> {
    DVector::from_fn(source.dim(), |i, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if source.is_real_coordinate(i) { 0.0 } else { rng.sample(StandardNormal) };
        C64::new(re, im)
    })
}

pub(crate) fn ascent_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ASCENT_SEED)
}

/// Best ascent value over the unit, small basis sets and `restarts` random
/// starting points.
pub(crate) fn ascent_lower_bound(objective: &LinearObjective<'_>, restarts: usize) -> f64 {
    let source = objective.source;
    let mut starts = vec![DVector::from_vec(source.unit())];
    if source.dim() <= 16 {
        starts.extend((0..source.dim()).map(|i| DVector::from_vec(source.basis_vector(i))));
    }
    let mut rng = ascent_rng();
    starts.extend((0..restarts).map(|_| random_source_vector(source, &mut rng)));
    starts
        .into_iter()
        .map(|x| objective.ascend(x).0)
        .fold(0.0, f64::max)
}

pub(crate) fn coefficient_upper_bound(source: &BasisAlgebra, matrix: &DMatrix<C64>) -> f64 {
    if matrix.is_empty() {
        return 0.0;
    }
    matrix.clone().singular_values().max() * (source.dim() as f64).sqrt()
}

pub(crate) fn estimate(
    source: &BasisAlgebra,
    target: &SemisimpleAlgebra,
    matrix: &DMatrix<C64>,
    restarts: usize,
) -> NormInterval {
    let upper = coefficient_upper_bound(source, matrix);
    if upper == 0.0 {
        return NormInterval::exact(0.0);
    }
    let lower = ascent_lower_bound(&LinearObjective { source, target, matrix }, restarts);
    NormInterval { lower, upper: upper.max(lower) }
}
