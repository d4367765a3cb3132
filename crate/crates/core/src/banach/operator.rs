use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::FinDimBanachSpace;
use crate::algebra::NormInterval;
use crate::error::{Error, Result};

const SAMPLE_DIRECTIONS: usize = 2048;
const DIRECTION_GRID: usize = 4096;

/// Interval for `|T| = sup_{|x| <= 1} |T x|` with `t` a
/// `target.dim() x source.dim()` matrix.
///
/// The interval is exact (zero width up to rounding) when the source ball
/// is a polytope (maximize over vertices), the target ball is a polytope
/// (maximize dual norms of `T^T a_k`), or both norms are quadratic
/// (spectral norm after Cholesky whitening). Otherwise the lower end comes
/// from seeded sampling and the upper end from the Euclidean comparison
/// radii.
pub fn operator_norm_bound(t: &DMatrix<f64>, source: &FinDimBanachSpace, target: &FinDimBanachSpace) -> Result<NormInterval> {
    if t.nrows() != target.dim() || t.ncols() != source.dim() {
        return Err(Error::ShapeMismatch(format!(
            "map is {}x{} between spaces of dimensions {} and {}",
            t.nrows(),
            t.ncols(),
            source.dim(),
            target.dim()
        )));
    }
    if let Some(vertices) = source.ball_vertices() {
        let v = vertices.iter().map(|x| target.norm(&(t * x))).fold(0.0, f64::max);
        return Ok(NormInterval::exact(v));
    }
    if let Some(facets) = target.facet_functionals() {
        let tt = t.transpose();
        let v = facets.iter().map(|a| source.dual_norm(&(&tt * a))).fold(0.0, f64::max);
        return Ok(NormInterval::exact(v));
    }
    if let (Some(qs), Some(qt)) = (source.quadratic_form(), target.quadratic_form()) {
        let rs = qs.cholesky().expect("validated").l().transpose();
        let rt = qt.cholesky().expect("validated").l().transpose();
        let rs_inv = rs.try_inverse().expect("positive definite");
        let v = (rt * t * rs_inv).singular_values().max();
        return Ok(NormInterval::exact(v));
    }
    let ratio = |x: &DVector<f64>| {
        let n = source.norm(x);
        if n > 0.0 {
            target.norm(&(t * x)) / n
        } else {
            0.0
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_55ed);
    let mut lower: f64 = 0.0;
    let mut best = DVector::zeros(source.dim());
    for _ in 0..SAMPLE_DIRECTIONS {
        let x = DVector::from_fn(source.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let r = ratio(&x);
        if r > lower {
            lower = r;
            best = x;
        }
    }
    // coordinate pattern search from the best sample
    let mut step = 0.5;
    while step > 1e-9 && lower > 0.0 {
        let mut improved = false;
        for i in 0..source.dim() {
            for s in [step, -step] {
                let mut y = best.clone();
                y[i] += s * best.norm();
                let r = ratio(&y);
                if r > lower {
                    lower = r;
                    best = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let upper = t.clone().singular_values().max() * source.outer_radius() / target.inner_radius();
    Ok(NormInterval { lower, upper: upper.max(lower) })
}

/// `(s, s T)` with `s = min(1, 1 / upper)` so that `s T` is certified
/// non-expansive.
pub fn rescale_to_contraction(
    t: &DMatrix<f64>,
    source: &FinDimBanachSpace,
    target: &FinDimBanachSpace,
) -> Result<(f64, DMatrix<f64>)> {
    let bound = operator_norm_bound(t, source, target)?;
    if bound.upper <= 1.0 {
        return Ok((1.0, t.clone()));
    }
    let s = 1.0 / bound.upper;
    Ok((s, t * s))
}

/// Norm of the identity `(R^2, source) -> (R^2, target)`: the least
/// expansion of any linear splitting of the identity through `target`.
pub fn min_expansion_split(source: &FinDimBanachSpace, target: &FinDimBanachSpace) -> Result<f64> {
    if source.dim() != 2 || target.dim() != 2 {
        return Err(Error::Precondition("both spaces must be two-dimensional".into()));
    }
    let id = DMatrix::identity(2, 2);
    let bound = operator_norm_bound(&id, source, target)?;
    if bound.width() <= 1e-12 * bound.upper.max(1.0) {
        return Ok(bound.upper);
    }
    // direction search: grid over the half circle, then golden section
    let f = |theta: f64| {
        let x = DVector::from_column_slice(&[theta.cos(), theta.sin()]);
        target.norm(&x) / source.norm(&x)
    };
    let h = std::f64::consts::PI / DIRECTION_GRID as f64;
    let k = (0..DIRECTION_GRID).max_by(|&a, &b| f(a as f64 * h).total_cmp(&f(b as f64 * h))).expect("grid");
    let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(f(0.5 * (a + b)).max(f(k as f64 * h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::polygon_space;
    use std::f64::consts::PI;

    #[test]
    fn expansion_through_polygons() {
        let disk = FinDimBanachSpace::euclidean(2).unwrap();
        for (i, expected) in [(2, 2f64.sqrt()), (3, 2.0 / 3f64.sqrt())] {
            let v = min_expansion_split(&disk, &polygon_space(i).unwrap()).unwrap();
            assert!((v - expected).abs() <= 1e-12, "i={i}: {v}");
        }
        let v = min_expansion_split(&disk, &polygon_space(64).unwrap()).unwrap();
        assert!(v > 1.0 && v <= 1.0004);
        assert!((v - 1.0 / (PI / 128.0).cos()).abs() <= 1e-12);
    }

    #[test]
    fn direction_search_agrees_with_closed_form() {
        // l3 -> l4 is not covered by an exact rule
        let s = FinDimBanachSpace::lp(2, 3.0).unwrap();
        let t = FinDimBanachSpace::lp(2, 1.5).unwrap();
        let v = min_expansion_split(&s, &t).unwrap();
        // |x|_q / |x|_p is maximal on the diagonal for q < p: 2^(1/q - 1/p)
        let expected = 2f64.powf(1.0 / 1.5 - 1.0 / 3.0);
        assert!((v - expected).abs() <= 1e-9, "{v} vs {expected}");
    }

    #[test]
    fn exact_rules() {
        let l2 = FinDimBanachSpace::euclidean(2).unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let n = operator_norm_bound(&t, &l2, &l2).unwrap();
        assert!((n.upper - (3.0 + 8f64.sqrt()).sqrt()).abs() <= 1e-12);
        let l1 = FinDimBanachSpace::lp(2, 1.0).unwrap();
        // l1 -> l1 norm is the largest column sum
        assert!((operator_norm_bound(&t, &l1, &l1).unwrap().upper - 3.0).abs() <= 1e-15);
        let linf = FinDimBanachSpace::lp(2, f64::INFINITY).unwrap();
        // linf -> linf norm is the largest row sum, via the facet rule from l3
        assert!((operator_norm_bound(&t, &linf, &linf).unwrap().upper - 3.0).abs() <= 1e-15);
        assert!(operator_norm_bound(&t, &l2, &FinDimBanachSpace::euclidean(3).unwrap()).is_err());
    }

    #[test]
    fn sampled_interval_brackets_truth() {
        let s = FinDimBanachSpace::lp(3, 3.0).unwrap();
        let t = FinDimBanachSpace::lp(3, 4.0).unwrap();
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.0, 1.0, 0.3, 0.1, 0.0, 1.0]);
        let n = operator_norm_bound(&m, &s, &t).unwrap();
        assert!(n.lower <= n.upper);
        assert!(n.lower >= 1.0);
    }

    #[test]
    fn rescaling() {
        let l2 = FinDimBanachSpace::euclidean(2).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        let (s, m) = rescale_to_contraction(&(&id * 0.5), &l2, &l2).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(m, &id * 0.5);
        let (s, m) = rescale_to_contraction(&(&id * 1.25), &l2, &l2).unwrap();
        assert!((s - 0.8).abs() <= 1e-15);
        assert!(operator_norm_bound(&m, &l2, &l2).unwrap().upper <= 1.0 + 1e-15);
        // 1 + L with |L| = 0.1
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.1, 1.0]);
        let (s, _) = rescale_to_contraction(&g, &l2, &l2).unwrap();
        assert!(s >= 1.0 / 1.1);
    }
}
