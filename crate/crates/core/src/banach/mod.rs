//! Finite-dimensional real Banach spaces with computable norms: `l^p`
//! norms, polytope norms given by facet functionals, and ellipsoidal norms
//! given by a positive-definite form.

mod graph;
mod hausdorff;
mod operator;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph::{graph_approximate, SubspaceGraph};
pub use hausdorff::{hausdorff_certificate, hausdorff_distance_balls, UnitBall, HAUSDORFF_MAX_DIM, HAUSDORFF_TOL};
pub use operator::{min_expansion_split, operator_norm_bound, rescale_to_contraction};

/// Largest number of (facet subset, sign pattern) candidates examined when
/// enumerating the vertices of a polytope ball.
const MAX_VERTEX_CANDIDATES: usize = 4_000_000;
const FEASIBILITY_SLACK: f64 = 1e-9;

/// Wire form of a norm on `R^d`.
///
/// `{"kind":"lp","dim":3,"p":"inf"}`, `{"kind":"polytope","facets":[[1,0],[0,1]]}`
/// (the ball is `max_k |a_k . x| <= 1`), `{"kind":"ellipsoid","form":[[2,0],[0,1]]}`
/// (the norm is `sqrt(x^T Q x)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormDescriptor {
    Lp {
        dim: usize,
        #[serde(with = "exponent")]
        p: f64,
    },
    Polytope {
        facets: Vec<Vec<f64>>,
    },
    Ellipsoid {
        form: Vec<Vec<f64>>,
    },
}

mod exponent {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            Wire::Text("inf".into()).serialize(s)
        } else {
            Wire::Number(*p).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Wire::deserialize(d)? {
            Wire::Number(p) => Ok(p),
            Wire::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Wire::Text(t) => Err(serde::de::Error::custom(format!("bad exponent {t:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Lp(f64),
    Polytope { facets: DMatrix<f64>, vertices: Vec<DVector<f64>> },
    Ellipsoid { form: DMatrix<f64>, inverse: DMatrix<f64>, factor: DMatrix<f64> },
}

/// `R^d` with one of the supported norms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "NormDescriptor", into = "NormDescriptor")]
pub struct FinDimBanachSpace {
    dim: usize,
    descriptor: NormDescriptor,
    kind: Kind,
}

impl PartialEq for FinDimBanachSpace {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

impl TryFrom<NormDescriptor> for FinDimBanachSpace {
    type Error = Error;

    fn try_from(desc: NormDescriptor) -> Result<Self> {
        FinDimBanachSpace::new(desc)
    }
}

impl From<FinDimBanachSpace> for NormDescriptor {
    fn from(space: FinDimBanachSpace) -> Self {
        space.descriptor
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidNorm(format!("{what} must be a non-empty rectangular array")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidNorm(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

impl FinDimBanachSpace {
    pub fn new(descriptor: NormDescriptor) -> Result<Self> {
        let (dim, kind) = match &descriptor {
            NormDescriptor::Lp { dim, p } => {
                if *dim == 0 {
                    return Err(Error::InvalidNorm("dimension must be positive".into()));
                }
                if !(*p >= 1.0) {
                    return Err(Error::InvalidNorm(format!("exponent {p} is below 1")));
                }
                (*dim, Kind::Lp(*p))
            }
            NormDescriptor::Polytope { facets } => {
                let a = rows_to_matrix(facets, "facets")?;
                let d = a.ncols();
                if a.clone().svd(false, false).rank(1e-10) < d {
                    return Err(Error::InvalidNorm("facet functionals do not span the dual; the ball is unbounded".into()));
                }
                let vertices = polytope_vertices(&a)?;
                (d, Kind::Polytope { facets: a, vertices })
            }
            NormDescriptor::Ellipsoid { form } => {
                let q = rows_to_matrix(form, "form")?;
                if q.nrows() != q.ncols() {
                    return Err(Error::InvalidNorm("form must be square".into()));
                }
                if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
                    return Err(Error::InvalidNorm("form must be symmetric".into()));
                }
                let chol = q
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::InvalidNorm("form is not positive definite".into()))?;
                let factor = chol.l().transpose();
                let inverse = chol.inverse();
                (q.nrows(), Kind::Ellipsoid { form: q, inverse, factor })
            }
        };
        Ok(FinDimBanachSpace { dim, descriptor, kind })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        Self::new(NormDescriptor::Lp { dim, p })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::lp(dim, 2.0)
    }

    pub fn polytope(facets: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(NormDescriptor::Polytope { facets })
    }

    pub fn ellipsoid(form: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(NormDescriptor::Ellipsoid { form })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn descriptor(&self) -> &NormDescriptor {
        &self.descriptor
    }

    fn check_len(&self, x: &DVector<f64>) {
        assert_eq!(x.len(), self.dim, "vector length must match the space dimension");
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.check_len(x);
        match &self.kind {
            Kind::Lp(p) => lp_norm(x, *p),
            Kind::Polytope { facets, .. } => (facets * x).amax(),
            Kind::Ellipsoid { factor, .. } => (factor * x).norm(),
        }
    }

    /// `sup_{|x| <= 1} u . x`, the support function of the unit ball.
    pub fn dual_norm(&self, u: &DVector<f64>) -> f64 {
        self.check_len(u);
        match &self.kind {
            Kind::Lp(p) => lp_norm(u, conjugate_exponent(*p)),
            Kind::Polytope { vertices, .. } => vertices.iter().map(|v| v.dot(u).abs()).fold(0.0, f64::max),
            Kind::Ellipsoid { inverse, .. } => u.dot(&(inverse * u)).max(0.0).sqrt(),
        }
    }

    /// A point `x` of the unit ball with `u . x = |u|_*`.
    pub fn dual_point(&self, u: &DVector<f64>) -> DVector<f64> {
        self.check_len(u);
        let d = self.dim;
        match &self.kind {
            Kind::Lp(p) if *p == 1.0 => {
                let i = u.iamax();
                let mut x = DVector::zeros(d);
                x[i] = if u[i] < 0.0 { -1.0 } else { 1.0 };
                x
            }
            Kind::Lp(p) if p.is_infinite() => u.map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 }),
            Kind::Lp(p) => {
                let q = conjugate_exponent(*p);
                let n = lp_norm(u, q);
                if n == 0.0 {
                    return DVector::zeros(d);
                }
                u.map(|v| v.signum() * (v.abs() / n).powf(q - 1.0))
            }
            Kind::Polytope { vertices, .. } => vertices
                .iter()
                .max_by(|a, b| a.dot(u).total_cmp(&b.dot(u)))
                .expect("bounded polytope has vertices")
                .clone(),
            Kind::Ellipsoid { inverse, .. } => {
                let w = inverse * u;
                let n = u.dot(&w).max(0.0).sqrt();
                if n == 0.0 {
                    DVector::zeros(d)
                } else {
                    w / n
                }
            }
        }
    }

    /// Largest Euclidean length of a point of the unit ball.
    pub fn outer_radius(&self) -> f64 {
        let d = self.dim as f64;
        match &self.kind {
            Kind::Lp(p) => d.powf((0.5 - 1.0 / p).max(0.0)),
            Kind::Polytope { vertices, .. } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Kind::Ellipsoid { form, .. } => 1.0 / form.symmetric_eigenvalues().min().sqrt(),
        }
    }

    /// Radius of the largest Euclidean ball inside the unit ball.
    pub fn inner_radius(&self) -> f64 {
        let d = self.dim as f64;
        match &self.kind {
            Kind::Lp(p) => d.powf((0.5 - 1.0 / p).min(0.0)),
            Kind::Polytope { facets, .. } => {
                facets.row_iter().map(|a| 1.0 / a.norm()).fold(f64::INFINITY, f64::min)
            }
            Kind::Ellipsoid { form, .. } => 1.0 / form.symmetric_eigenvalues().max().sqrt(),
        }
    }

    /// Extreme points of the unit ball when it is a polytope.
    pub fn ball_vertices(&self) -> Option<Vec<DVector<f64>>> {
        match &self.kind {
            Kind::Lp(p) if *p == 1.0 => Some(signed_units(self.dim)),
            Kind::Lp(p) if p.is_infinite() && self.dim <= 16 => Some(sign_vectors(self.dim)),
            Kind::Polytope { vertices, .. } => Some(vertices.clone()),
            _ => None,
        }
    }

    /// Functionals `a_k` with `|x| = max_k |a_k . x|` when the ball is a
    /// polytope.
    pub fn facet_functionals(&self) -> Option<Vec<DVector<f64>>> {
        match &self.kind {
            Kind::Lp(p) if p.is_infinite() => Some((0..self.dim).map(|i| unit(self.dim, i)).collect()),
            Kind::Lp(p) if *p == 1.0 && self.dim <= 16 => Some(half_sign_vectors(self.dim)),
            Kind::Polytope { facets, .. } => Some(facets.row_iter().map(|r| r.transpose()).collect()),
            _ => None,
        }
    }

    /// `Q` with `|x|^2 = x^T Q x` for Euclidean and ellipsoidal norms.
    pub fn quadratic_form(&self) -> Option<DMatrix<f64>> {
        match &self.kind {
            Kind::Lp(p) if *p == 2.0 => Some(DMatrix::identity(self.dim, self.dim)),
            Kind::Ellipsoid { form, .. } => Some(form.clone()),
            _ => None,
        }
    }

    /// The norm `y -> |B y|` on the coordinates of the column span of
    /// `basis`. Available for quadratic and polytope norms.
    pub fn induced(&self, basis: &DMatrix<f64>) -> Result<FinDimBanachSpace> {
        if basis.nrows() != self.dim || basis.ncols() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "basis is {}x{} in a space of dimension {}",
                basis.nrows(),
                basis.ncols(),
                self.dim
            )));
        }
        if basis.clone().svd(false, false).rank(1e-10) < basis.ncols() {
            return Err(Error::Precondition("basis columns are linearly dependent".into()));
        }
        if let Some(q) = self.quadratic_form() {
            let g = basis.transpose() * q * basis;
            let g = (&g + g.transpose()) * 0.5;
            return Self::ellipsoid(to_rows(&g));
        }
        if let Some(facets) = self.facet_functionals() {
            let rows = facets.iter().map(|a| (basis.transpose() * a).iter().copied().collect()).collect();
            return Self::polytope(rows);
        }
        Err(Error::InvalidNorm("induced norms are available for quadratic and polytope norms only".into()))
    }

    /// Checks definiteness on the basis and homogeneity and the triangle
    /// inequality on `trials` random triples, to relative tolerance 1e-9.
    pub fn check_norm_axioms<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> Result<()> {
        for i in 0..self.dim {
            if !(self.norm(&unit(self.dim, i)) > 0.0) {
                return Err(Error::InvalidNorm(format!("basis vector {i} has norm 0")));
            }
        }
        let gauss = |rng: &mut R| DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        for _ in 0..trials {
            let (x, y) = (gauss(rng), gauss(rng));
            let t: f64 = rng.sample(StandardNormal);
            let (nx, ny) = (self.norm(&x), self.norm(&y));
            let scale = 1e-9 * (nx + ny).max(1.0);
            if (self.norm(&(&x * t)) - t.abs() * nx).abs() > scale * t.abs().max(1.0) {
                return Err(Error::InvalidNorm("homogeneity fails".into()));
            }
            if self.norm(&(&x + &y)) > nx + ny + scale {
                return Err(Error::InvalidNorm("triangle inequality fails".into()));
            }
        }
        Ok(())
    }
}

/// `R^2` whose unit ball is the convex hull of the `2i`-th roots of unity.
pub fn polygon_space(i: usize) -> Result<FinDimBanachSpace> {
    if i < 2 {
        return Err(Error::Precondition(format!("polygon index {i} must be at least 2")));
    }
    let apothem = (std::f64::consts::PI / (2 * i) as f64).cos();
    let facets = (0..i)
        .map(|k| {
            let t = (k as f64 + 0.5) * std::f64::consts::PI / i as f64;
            vec![t.cos() / apothem, t.sin() / apothem]
        })
        .collect();
    FinDimBanachSpace::polytope(facets)
}

fn lp_norm(x: &DVector<f64>, p: f64) -> f64 {
    if p.is_infinite() {
        x.amax()
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.norm()
    } else {
        let m = x.amax();
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn unit(d: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(d);
    e[i] = 1.0;
    e
}

fn signed_units(d: usize) -> Vec<DVector<f64>> {
    (0..d).flat_map(|i| [unit(d, i), -unit(d, i)]).collect()
}

fn sign_vectors(d: usize) -> Vec<DVector<f64>> {
    (0..1usize << d)
        .map(|m| DVector::from_fn(d, |i, _| if m >> i & 1 == 1 { -1.0 } else { 1.0 }))
        .collect()
}

/// Sign vectors up to overall sign.
fn half_sign_vectors(d: usize) -> Vec<DVector<f64>> {
    sign_vectors(d).into_iter().filter(|v| v[d - 1] > 0.0).collect()
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn polytope_vertices(a: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let (m, d) = a.shape();
    let subsets = binomial(m, d).saturating_mul(1usize << d.min(60));
    if subsets > MAX_VERTEX_CANDIDATES {
        return Err(Error::InvalidNorm(format!("{m} facets in dimension {d} are too many to enumerate")));
    }
    let mut out: Vec<DVector<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let sub = DMatrix::from_fn(d, d, |r, c| a[(idx[r], c)]);
        if let Some(lu) = sub.clone().lu().try_inverse() {
            for signs in sign_vectors(d) {
                let v = &lu * &signs;
                if (a * &v).amax() <= 1.0 + FEASIBILITY_SLACK
                    && !out.iter().any(|w| (w - &v).amax() <= 1e-9)
                {
                    out.push(v);
                }
            }
        }
        // next combination in lexicographic order
        let mut k = d;
        while k > 0 && idx[k - 1] == m - d + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for j in k..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
