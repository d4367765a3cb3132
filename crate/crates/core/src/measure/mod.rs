//! Finite metric spaces (distances may be infinite), finitely supported
//! probability and complex measures on them, and the
//! Kantorovich-Rubinstein distance between such measures.

mod transport;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub use transport::{kr_distance, KrReport, MAX_SUPPORT};

const AXIOM_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-12;

/// Serde helpers for extended reals, writing infinity as `"inf"`.
pub(crate) mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Number(f64),
        Text(String),
    }

    fn to_wire(x: f64) -> Wire {
        if x == f64::INFINITY {
            Wire::Text("inf".into())
        } else {
            Wire::Number(x)
        }
    }

    fn from_wire<E: serde::de::Error>(w: Wire) -> Result<f64, E> {
        match w {
            Wire::Number(x) => Ok(x),
            Wire::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Wire::Text(t) => Err(E::custom(format!("bad extended real {t:?}"))),
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_wire(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_wire(Wire::deserialize(d)?)
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(m: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
            let rows: Vec<Vec<Wire>> = m.iter().map(|r| r.iter().map(|&x| to_wire(x)).collect()).collect();
            rows.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
            let rows = Vec::<Vec<Wire>>::deserialize(d)?;
            rows.into_iter().map(|r| r.into_iter().map(from_wire).collect()).collect()
        }
    }

    pub mod option_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref().map(|v| v.iter().map(|&x| to_wire(x)).collect::<Vec<_>>()).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
            match Option::<Vec<Wire>>::deserialize(d)? {
                None => Ok(None),
                Some(v) => v.into_iter().map(from_wire).collect::<Result<_, _>>().map(Some),
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MetricWire {
    #[serde(with = "extended::matrix")]
    distances: Vec<Vec<f64>>,
}

/// `n` points with a symmetric distance matrix. Infinite distances are
/// allowed and make the space extended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricWire", into = "MetricWire")]
pub struct FiniteMetricSpace {
    distances: Vec<Vec<f64>>,
    extended: bool,
}

impl TryFrom<MetricWire> for FiniteMetricSpace {
    type Error = Error;

    fn try_from(w: MetricWire) -> Result<Self> {
        FiniteMetricSpace::new(w.distances)
    }
}

impl From<FiniteMetricSpace> for MetricWire {
    fn from(s: FiniteMetricSpace) -> Self {
        MetricWire { distances: s.distances }
    }
}

impl FiniteMetricSpace {
    /// Checks the metric axioms exhaustively, including the triangle
    /// inequality on all triples.
    pub fn new(distances: Vec<Vec<f64>>) -> Result<Self> {
        let n = distances.len();
        if distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric("distance matrix is not square".into()));
        }
        let scale = distances.iter().flatten().filter(|x| x.is_finite()).fold(1.0f64, |a, &x| a.max(x));
        let mut extended = false;
        for i in 0..n {
            if distances[i][i] != 0.0 {
                return Err(Error::InvalidMetric(format!("d({i}, {i}) is not zero")));
            }
            for j in 0..n {
                let d = distances[i][j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!("d({i}, {j}) = {d}")));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidMetric(format!("distinct points {i} and {j} at distance 0")));
                }
                if d != distances[j][i] {
                    return Err(Error::InvalidMetric(format!("d({i}, {j}) != d({j}, {i})")));
                }
                extended |= d.is_infinite();
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if distances[i][k] > distances[i][j] + distances[j][k] + AXIOM_TOL * scale {
                        return Err(Error::InvalidMetric(format!("triangle inequality fails on ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { distances, extended })
    }

    /// All distinct points at distance 1.
    pub fn discrete(n: usize) -> Self {
        let d = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(d).expect("discrete metric")
    }

    /// Euclidean distances between the given points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let d = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        Self::new(d)
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        &self.distances
    }

    /// Whether `f: self -> target` satisfies `d(f x, f y) <= c d(x, y)`.
    pub fn is_lipschitz(&self, f: &[usize], target: &FiniteMetricSpace, c: f64) -> bool {
        f.len() == self.len()
            && f.iter().all(|&y| y < target.len())
            && (0..self.len()).all(|x| {
                (0..self.len()).all(|y| {
                    let d = self.distances[x][y];
                    d.is_infinite() || target.distance(f[x], f[y]) <= c * d + AXIOM_TOL * d.max(1.0)
                })
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// Non-negative real weights summing to 1.
    Probability,
    /// Complex weights of total variation at most 1.
    AbsolutelyConvex,
}

/// Wire form; the base space is supplied alongside.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureDescriptor {
    pub kind: MeasureKind,
    pub weights: Vec<C64>,
}

/// A measure on a [`FiniteMetricSpace`] given by one weight per point.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitelySupportedMeasure {
    space: Arc<FiniteMetricSpace>,
    weights: Vec<C64>,
    kind: MeasureKind,
}

impl FinitelySupportedMeasure {
    pub fn new(space: Arc<FiniteMetricSpace>, weights: Vec<C64>, kind: MeasureKind) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} weights on a space of {} points",
                weights.len(),
                space.len()
            )));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::InvalidMeasure("weights must be finite".into()));
        }
        match kind {
            MeasureKind::Probability => {
                if weights.iter().any(|w| w.im != 0.0 || w.re < 0.0) {
                    return Err(Error::InvalidMeasure("probability weights must be real and non-negative".into()));
                }
                let total: f64 = weights.iter().map(|w| w.re).sum();
                if (total - 1.0).abs() > MASS_TOL {
                    return Err(Error::InvalidMeasure(format!("probability weights sum to {total}")));
                }
            }
            MeasureKind::AbsolutelyConvex => {
                let tv: f64 = weights.iter().map(|w| w.norm()).sum();
                if tv > 1.0 + MASS_TOL {
                    return Err(Error::InvalidMeasure(format!("total variation {tv} exceeds 1")));
                }
            }
        }
        Ok(FinitelySupportedMeasure { space, weights, kind })
    }

    pub fn probability(space: Arc<FiniteMetricSpace>, weights: &[f64]) -> Result<Self> {
        Self::new(space, weights.iter().map(|&w| C64::new(w, 0.0)).collect(), MeasureKind::Probability)
    }

    pub fn absolutely_convex(space: Arc<FiniteMetricSpace>, weights: Vec<C64>) -> Result<Self> {
        Self::new(space, weights, MeasureKind::AbsolutelyConvex)
    }

    /// The point mass at `x`.
    pub fn dirac(space: Arc<FiniteMetricSpace>, x: usize) -> Result<Self> {
        if x >= space.len() {
            return Err(Error::InvalidMeasure(format!("point {x} is not in the space")));
        }
        let mut w = vec![C64::new(0.0, 0.0); space.len()];
        w[x] = C64::new(1.0, 0.0);
        Self::new(space, w, MeasureKind::Probability)
    }

    pub fn zero(space: Arc<FiniteMetricSpace>) -> Self {
        let w = vec![C64::new(0.0, 0.0); space.len()];
        FinitelySupportedMeasure { space, weights: w, kind: MeasureKind::AbsolutelyConvex }
    }

    pub fn from_descriptor(space: Arc<FiniteMetricSpace>, desc: MeasureDescriptor) -> Result<Self> {
        Self::new(space, desc.weights, desc.kind)
    }

    pub fn to_descriptor(&self) -> MeasureDescriptor {
        MeasureDescriptor { kind: self.kind, weights: self.weights.clone() }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn total_mass(&self) -> C64 {
        self.weights.iter().sum()
    }

    /// Image measure under `f: space -> target`.
    pub fn pushforward(&self, f: &[usize], target: Arc<FiniteMetricSpace>) -> Result<Self> {
        if f.len() != self.space.len() || f.iter().any(|&y| y >= target.len()) {
            return Err(Error::InvalidMeasure("map does not send every point into the target".into()));
        }
        let mut w = vec![C64::new(0.0, 0.0); target.len()];
        for (x, &y) in f.iter().enumerate() {
            w[y] += self.weights[x];
        }
        // summing non-negative weights keeps the mass up to rounding
        if self.kind == MeasureKind::Probability {
            let total: f64 = w.iter().map(|z| z.re).sum();
            w.iter_mut().for_each(|z| *z /= total);
        }
        Self::new(target, w, self.kind)
    }
}

fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `sum_i lambda_i mu_i`. Probability combinations need real non-negative
/// weights summing to 1 and probability inputs; absolutely convex ones
/// need `sum |lambda_i| <= 1`.
pub fn combine(weights: &[C64], measures: &[FinitelySupportedMeasure], kind: MeasureKind) -> Result<FinitelySupportedMeasure> {
    if weights.len() != measures.len() || measures.is_empty() {
        return Err(Error::InvalidWeights(format!("{} weights for {} measures", weights.len(), measures.len())));
    }
    let space = measures[0].space.clone();
    if measures.iter().any(|m| !same_space(&m.space, &space)) {
        return Err(Error::MismatchedSpaces);
    }
    match kind {
        MeasureKind::Probability => {
            if weights.iter().any(|w| w.im != 0.0 || w.re < 0.0) {
                return Err(Error::InvalidWeights("convex weights must be real and non-negative".into()));
            }
            let total: f64 = weights.iter().map(|w| w.re).sum();
            if (total - 1.0).abs() > MASS_TOL {
                return Err(Error::InvalidWeights(format!("convex weights sum to {total}")));
            }
            if measures.iter().any(|m| m.kind != MeasureKind::Probability) {
                return Err(Error::InvalidWeights("convex combinations take probability measures".into()));
            }
        }
        MeasureKind::AbsolutelyConvex => {
            let tv: f64 = weights.iter().map(|w| w.norm()).sum();
            if tv > 1.0 + MASS_TOL {
                return Err(Error::InvalidWeights(format!("sum of |weights| is {tv}")));
            }
        }
    }
    let mut w = vec![C64::new(0.0, 0.0); space.len()];
    for (l, m) in weights.iter().zip(measures) {
        for (acc, x) in w.iter_mut().zip(&m.weights) {
            *acc += l * x;
        }
    }
    if kind == MeasureKind::Probability {
        w.iter_mut().for_each(|z| z.re = z.re.max(0.0));
    }
    FinitelySupportedMeasure::new(space, w, kind)
}

/// `|mu| = sum_x |mu(x)|`.
pub fn acvx_seminorm(mu: &FinitelySupportedMeasure) -> f64 {
    mu.weights.iter().map(|w| w.norm()).sum()
}

/// `d(mu, nu) = |mu| + |nu|`.
pub fn pseudometric(mu: &FinitelySupportedMeasure, nu: &FinitelySupportedMeasure) -> f64 {
    acvx_seminorm(mu) + acvx_seminorm(nu)
}
