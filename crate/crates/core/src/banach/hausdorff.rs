use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};

use super::FinDimBanachSpace;
use crate::algebra::NormInterval;
use crate::error::{Error, Result};

/// Largest ambient dimension accepted by the certified computation.
pub const HAUSDORFF_MAX_DIM: usize = 4;
/// Default certificate gap.
pub const HAUSDORFF_TOL: f64 = 1e-6;
const DEFAULT_BUDGET: usize = 4_000_000;
const INITIAL_SPLITS: usize = 8;

/// The image `B(ball of norm)` of the unit ball of a norm on `R^k` under a
/// `d x k` matrix of full column rank.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitBall {
    basis: DMatrix<f64>,
    norm: FinDimBanachSpace,
}

impl UnitBall {
    pub fn new(basis: DMatrix<f64>, norm: FinDimBanachSpace) -> Result<Self> {
        if basis.ncols() != norm.dim() || basis.ncols() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "basis has {} columns but the norm lives in dimension {}",
                basis.ncols(),
                norm.dim()
            )));
        }
        if basis.clone().svd(false, false).rank(1e-10) < basis.ncols() {
            return Err(Error::Precondition("basis columns are linearly dependent".into()));
        }
        Ok(UnitBall { basis, norm })
    }

    /// The unit ball of `space` itself.
    pub fn of_space(space: &FinDimBanachSpace) -> Self {
        UnitBall { basis: DMatrix::identity(space.dim(), space.dim()), norm: space.clone() }
    }

    /// The unit ball of the column span of `basis` for the restricted
    /// ambient norm.
    pub fn induced(ambient: &FinDimBanachSpace, basis: DMatrix<f64>) -> Result<Self> {
        let norm = ambient.induced(&basis)?;
        Self::new(basis, norm)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn norm(&self) -> &FinDimBanachSpace {
        &self.norm
    }

    /// `h(u) = sup_{x in ball} u . x`.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        self.norm.dual_norm(&(self.basis.transpose() * u))
    }

    /// A point of the ball attaining `h(u)`.
    pub fn support_point(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.basis * self.norm.dual_point(&(self.basis.transpose() * u))
    }
}

#[derive(Debug)]
struct Cell {
    bound: f64,
    face: usize,
    center: Vec<f64>,
    half: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.bound.total_cmp(&other.bound) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

/// Hausdorff distance between two unit balls in the ambient norm, to
/// within [`HAUSDORFF_TOL`].
pub fn hausdorff_distance_balls(k: &UnitBall, l: &UnitBall, ambient: &FinDimBanachSpace) -> Result<f64> {
    Ok(hausdorff_certificate(k, l, ambient, HAUSDORFF_TOL, DEFAULT_BUDGET)?.lower)
}

struct Problem<'a> {
    k: &'a UnitBall,
    l: &'a UnitBall,
    ambient: &'a FinDimBanachSpace,
    d: usize,
}

impl Problem<'_> {
    fn direction(&self, face: usize, coords: &[f64]) -> DVector<f64> {
        let (axis, sign) = (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 });
        let mut u = DVector::zeros(self.d);
        let mut it = coords.iter();
        for i in 0..self.d {
            u[i] = if i == axis { sign } else { *it.next().expect("face coordinates") };
        }
        u
    }

    /// Value at the cell center and an upper bound over the cell.
    ///
    /// Support functions and the dual norm are convex, so each lies above
    /// its tangent plane at the center, and a convex function on the cell
    /// is largest at a corner.
    fn evaluate(&self, face: usize, center: &[f64], half: f64) -> (f64, f64) {
        let c = self.direction(face, center);
        let (hk, hl, n) = (self.k.support(&c), self.l.support(&c), self.ambient.dual_norm(&c));
        let value = (hk - hl).abs() / n;
        let (xk, xl, xn) = (self.k.support_point(&c), self.l.support_point(&c), self.ambient.dual_point(&c));
        let mut up: f64 = 0.0;
        let mut n_low = f64::INFINITY;
        for m in 0..1usize << (self.d - 1) {
            let corner: Vec<f64> =
                center.iter().enumerate().map(|(j, x)| if m >> j & 1 == 1 { x + half } else { x - half }).collect();
            let v = self.direction(face, &corner);
            let dv = &v - &c;
            up = up.max(self.k.support(&v) - hl - xl.dot(&dv)).max(self.l.support(&v) - hk - xk.dot(&dv));
            n_low = n_low.min(n + xn.dot(&dv));
        }
        // |u|_inf = 1 on the cube, so |u|_2 >= 1
        let n_low = n_low.max(self.ambient.inner_radius());
        (value, (up.max(0.0) / n_low).max(value))
    }
}

/// Certified interval for the Hausdorff distance, using
/// `d_H(K, L) = sup_u |h_K(u) - h_L(u)| / |u|_*`.
///
/// Directions range over the faces of the cube `|u|_inf = 1`. Cells are
/// refined best-first until the largest cell bound is within `tol` of the
/// best value found, or `budget` evaluations are spent.
pub fn hausdorff_certificate(
    k: &UnitBall,
    l: &UnitBall,
    ambient: &FinDimBanachSpace,
    tol: f64,
    budget: usize,
) -> Result<NormInterval> {
    let d = ambient.dim();
    if d > HAUSDORFF_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: HAUSDORFF_MAX_DIM });
    }
    if k.ambient_dim() != d || l.ambient_dim() != d {
        return Err(Error::ShapeMismatch("balls and ambient space have different dimensions".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let problem = Problem { k, l, ambient, d };
    let mut heap = BinaryHeap::new();
    let mut best: f64 = 0.0;
    let mut evaluations = 0;
    let mut pruned: f64 = 0.0;
    let n0 = if d == 1 { 1 } else { INITIAL_SPLITS };
    let half0 = 1.0 / n0 as f64;
    for face in 0..2 * d {
        for idx in 0..n0.pow((d - 1) as u32) {
            let center: Vec<f64> = (0..d - 1)
                .map(|j| {
                    let q = idx / n0.pow(j as u32) % n0;
                    -1.0 + (2 * q + 1) as f64 * half0
                })
                .collect();
            let (v, bound) = problem.evaluate(face, &center, half0);
            evaluations += 1;
            best = best.max(v);
            heap.push(Cell { bound, face, center, half: half0 });
        }
    }
    loop {
        let top = match heap.pop() {
            Some(cell) => cell,
            None => return Ok(NormInterval { lower: best, upper: pruned.max(best) }),
        };
        if top.bound - best <= tol {
            return Ok(NormInterval { lower: best, upper: top.bound.max(pruned).max(best) });
        }
        if evaluations >= budget {
            return Err(Error::CertificateBudget { gap: top.bound - best, target: tol });
        }
        let half = top.half / 2.0;
        for m in 0..1usize << (d - 1) {
            let center: Vec<f64> = top
                .center
                .iter()
                .enumerate()
                .map(|(j, x)| if m >> j & 1 == 1 { x + half } else { x - half })
                .collect();
            let (v, bound) = problem.evaluate(top.face, &center, half);
            evaluations += 1;
            best = best.max(v);
            if bound > best + tol {
                heap.push(Cell { bound, face: top.face, center, half });
            } else {
                pruned = pruned.max(bound);
            }
        }
    }
}
