use nalgebra::DMatrix;

use super::{operator_norm_bound, FinDimBanachSpace};
use crate::algebra::NormInterval;
use crate::error::{Error, Result};

const RANK_TOL: f64 = 1e-10;

/// A subspace written as the graph `{x + L x : x in F}` of an operator
/// `L: F -> E'` over a base subspace `F` with complement `E'`.
///
/// `F` and `E'` are stored as orthonormal column bases and `L` as the
/// `dim E' x dim F` matrix in those bases.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceGraph {
    ambient: FinDimBanachSpace,
    base: DMatrix<f64>,
    complement: DMatrix<f64>,
    operator: DMatrix<f64>,
}

/// Orthonormal basis of the span of `f` followed by one of its orthogonal
/// complement, by Gram-Schmidt on `[f | I]`.
fn orthonormal_split(f: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (d, k) = f.shape();
    if k == 0 || k > d {
        return Err(Error::ShapeMismatch(format!("subspace basis is {d}x{k}")));
    }
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
    let candidates = f.column_iter().map(|c| c.into_owned()).chain((0..d).map(|i| {
        let mut e = nalgebra::DVector::zeros(d);
        e[i] = 1.0;
        e
    }));
    for (j, mut v) in candidates.enumerate() {
        for _ in 0..2 {
            for q in &cols {
                let p = q.dot(&v);
                v -= q * p;
            }
        }
        let n = v.norm();
        if n > RANK_TOL.sqrt() {
            cols.push(v / n);
        } else if j < k {
            return Err(Error::Precondition("subspace basis columns are linearly dependent".into()));
        }
        if cols.len() == d {
            break;
        }
    }
    let base = DMatrix::from_columns(&cols[..k]);
    let complement = if k < d { DMatrix::from_columns(&cols[k..]) } else { DMatrix::zeros(d, 0) };
    Ok((base, complement))
}

impl SubspaceGraph {
    /// Graph of `operator` over the span of `base`, with the orthogonal
    /// complement as `E'`.
    pub fn over(ambient: FinDimBanachSpace, base: &DMatrix<f64>, operator: DMatrix<f64>) -> Result<Self> {
        if base.nrows() != ambient.dim() {
            return Err(Error::ShapeMismatch("base lives in a different dimension".into()));
        }
        let (base, complement) = orthonormal_split(base)?;
        if operator.shape() != (complement.ncols(), base.ncols()) {
            return Err(Error::ShapeMismatch(format!(
                "operator must be {}x{}",
                complement.ncols(),
                base.ncols()
            )));
        }
        Ok(SubspaceGraph { ambient, base, complement, operator })
    }

    pub fn ambient(&self) -> &FinDimBanachSpace {
        &self.ambient
    }

    pub fn base(&self) -> &DMatrix<f64> {
        &self.base
    }

    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    pub fn operator(&self) -> &DMatrix<f64> {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.base.ncols()
    }

    /// Columns `f_j + L f_j` spanning the graph.
    pub fn graph_basis(&self) -> DMatrix<f64> {
        &self.base + &self.complement * &self.operator
    }

    /// Spectral norm of `L` in the orthonormal bases.
    pub fn euclidean_operator_norm(&self) -> f64 {
        if self.operator.is_empty() {
            0.0
        } else {
            self.operator.clone().singular_values().max()
        }
    }

    /// Norm of `L` between `F` and `E'` with the restricted ambient norms.
    pub fn operator_norm(&self) -> Result<NormInterval> {
        if self.operator.is_empty() {
            return Ok(NormInterval::exact(0.0));
        }
        let src = self.ambient.induced(&self.base)?;
        let tgt = self.ambient.induced(&self.complement)?;
        operator_norm_bound(&self.operator, &src, &tgt)
    }
}

/// Writes the span of `fi` as a graph over the span of `f` along the
/// orthogonal complement of `f`.
pub fn graph_approximate(ambient: &FinDimBanachSpace, f: &DMatrix<f64>, fi: &DMatrix<f64>) -> Result<SubspaceGraph> {
    if f.nrows() != ambient.dim() || fi.nrows() != ambient.dim() {
        return Err(Error::ShapeMismatch("subspaces live in a different dimension".into()));
    }
    if f.ncols() != fi.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "subspaces of dimensions {} and {}",
            f.ncols(),
            fi.ncols()
        )));
    }
    let (base, complement) = orthonormal_split(f)?;
    let alpha = base.transpose() * fi;
    let smin = alpha.clone().singular_values().min();
    if !(smin > RANK_TOL) {
        return Err(Error::NotGraphComparable);
    }
    let beta = complement.transpose() * fi;
    let operator = beta * alpha.try_inverse().ok_or(Error::NotGraphComparable)?;
    Ok(SubspaceGraph { ambient: ambient.clone(), base, complement, operator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::{hausdorff_certificate, hausdorff_distance_balls, UnitBall};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn col(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(xs.len(), 1, xs)
    }

    #[test]
    fn same_subspace_gives_zero() {
        let e = FinDimBanachSpace::euclidean(3).unwrap();
        let f = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        let g = graph_approximate(&e, &f, &f).unwrap();
        assert!(g.operator().amax() <= 1e-15);
    }

    #[test]
    fn line_over_axis() {
        let e = FinDimBanachSpace::euclidean(2).unwrap();
        let g = graph_approximate(&e, &col(&[1.0, 0.0]), &col(&[1.0, 0.37])).unwrap();
        assert!((g.operator()[(0, 0)] - 0.37).abs() <= 1e-15);
        assert!(graph_approximate(&e, &col(&[1.0, 0.0]), &col(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn rotated_plane_in_space() {
        let e = FinDimBanachSpace::euclidean(3).unwrap();
        let f = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        for theta in [0.05, 0.2, 0.7] {
            // rotate about the x-axis, which lies in F
            let (s, c) = f64::sin_cos(theta);
            let fi = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, c, s]);
            let g = graph_approximate(&e, &f, &fi).unwrap();
            assert!((g.euclidean_operator_norm() - theta.tan()).abs() <= 1e-14);
            let n = g.operator_norm().unwrap();
            assert!((n.upper - theta.tan()).abs() <= 1e-12);
        }
    }

    #[test]
    fn recovery_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = FinDimBanachSpace::euclidean(4).unwrap();
        for _ in 0..20 {
            let base = DMatrix::from_fn(4, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let l = DMatrix::from_fn(2, 2, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal));
            let g = SubspaceGraph::over(e.clone(), &base, l.clone()).unwrap();
            let back = graph_approximate(&e, &base, &g.graph_basis()).unwrap();
            assert!((back.operator() - &l).amax() <= 1e-10);
        }
    }

    #[test]
    fn operator_norm_grows_with_ball_distance() {
        let e = FinDimBanachSpace::euclidean(2).unwrap();
        let f = col(&[1.0, 0.0]);
        let mut last = (0.0, 0.0);
        for theta in [0.02, 0.1, 0.3, 0.6, 0.9] {
            let fi = col(&[f64::cos(theta), f64::sin(theta)]);
            let l = graph_approximate(&e, &f, &fi).unwrap().euclidean_operator_norm();
            let d = hausdorff_distance_balls(
                &UnitBall::induced(&e, f.clone()).unwrap(),
                &UnitBall::induced(&e, fi).unwrap(),
                &e,
            )
            .unwrap();
            assert!(d > last.0 && l > last.1);
            last = (d, l);
        }
    }

    #[test]
    fn rotated_planes_in_three_space() {
        let e = FinDimBanachSpace::euclidean(3).unwrap();
        let f = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ball_f = UnitBall::induced(&e, f.clone()).unwrap();
        let mut last = (0.0, 0.0);
        for theta in [0.1, 0.4, 0.8] {
            let (s, c) = f64::sin_cos(theta);
            let fi = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, c, s]);
            let l = graph_approximate(&e, &f, &fi).unwrap().euclidean_operator_norm();
            let cert = hausdorff_certificate(&ball_f, &UnitBall::induced(&e, fi).unwrap(), &e, 1e-3, 4_000_000).unwrap();
            // the tilted disk's farthest point is (0, cos, sin), at distance sin(theta)
            assert!(cert.lower <= theta.sin() + 1e-12 && cert.upper >= theta.sin() - 1e-12);
            assert!(cert.lower > last.0 && l > last.1);
            last = (cert.lower, l);
        }
    }
}
