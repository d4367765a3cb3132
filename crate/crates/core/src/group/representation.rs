use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::algebra::{AlgebraElement, BasisAlgebra, Field, GroupAlgebra, LinearMap, SemisimpleAlgebra};
use crate::error::{Error, Result};
use crate::stabilization::{basis_defect, polar_decompose};
use crate::tolerance::{EXACT_REPRESENTATION, SINGULAR, UNITARY};
use crate::C64;

/// Defect above which [`restrict_to_group`] refuses a linear map.
pub const RESTRICT_DEFECT_THRESHOLD: f64 = 1e-8;

/// Wire form of a representation; the group is supplied alongside.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationDescriptor {
    pub algebra: SemisimpleAlgebra,
    pub values: Vec<AlgebraElement>,
}

/// A map `g -> phi(g)` from a finite group into the invertible elements of
/// an algebra. The `unitary` and `exact` flags are recomputed whenever a
/// representation is built, so they always describe the stored values.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    algebra: SemisimpleAlgebra,
    values: Vec<AlgebraElement>,
    unitary: bool,
    exact: bool,
}

impl Representation {
    pub fn new(group: Arc<FiniteGroup>, algebra: SemisimpleAlgebra, values: Vec<AlgebraElement>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        for v in &values {
            algebra.check(v)?;
            let s = v.min_singular_value();
            if !(s > SINGULAR) {
                return Err(Error::Singular { min_singular_value: s });
            }
        }
        let unitary = values.iter().all(|v| v.is_unitary(UNITARY));
        let mut rep = Representation { group, algebra, values, unitary, exact: false };
        rep.exact = rep.defect() <= EXACT_REPRESENTATION;
        Ok(rep)
    }

    pub fn from_descriptor(group: Arc<FiniteGroup>, desc: RepresentationDescriptor) -> Result<Self> {
        Self::new(group, desc.algebra, desc.values)
    }

    pub fn to_descriptor(&self) -> RepresentationDescriptor {
        RepresentationDescriptor { algebra: self.algebra.clone(), values: self.values.clone() }
    }

    /// `phi(g) = 1` in `algebra`.
    pub fn trivial(group: Arc<FiniteGroup>, algebra: SemisimpleAlgebra) -> Self {
        let values = vec![algebra.identity(); group.order()];
        Self::new(group, algebra, values).expect("identity values")
    }

    /// Left regular representation by permutation matrices in one
    /// `|G| x |G|` block over `field`.
    pub fn regular(group: Arc<FiniteGroup>, field: Field) -> Self {
        let n = group.order();
        let algebra = SemisimpleAlgebra::new(vec![crate::algebra::Block { field, n }]).expect("n >= 1");
        let values = group
            .elements()
            .map(|g| {
                let mut m = DMatrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = C64::new(1.0, 0.0);
                }
                AlgebraElement::from_matrix(m)
            })
            .collect();
        Self::new(group, algebra, values).expect("permutation matrices")
    }

    /// One-dimensional representation with the given character values.
    pub fn from_character(group: Arc<FiniteGroup>, chi: &[C64]) -> Result<Self> {
        let values = chi.iter().map(|&z| AlgebraElement::scalar(z)).collect();
        Self::new(group, SemisimpleAlgebra::scalars(), values)
    }

    /// `Z/n -> M_2(R)`, `k -> rotation by 2 pi k / n`. Fails for other groups.
    pub fn cyclic_rotation(group: Arc<FiniteGroup>) -> Result<Self> {
        let n = group.order();
        if *group != FiniteGroup::cyclic(n) {
            return Err(Error::Precondition("rotation representation needs a cyclic group".into()));
        }
        let values = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let (s, c) = t.sin_cos();
                AlgebraElement::from_real_rows(&[&[c, -s], &[s, c]])
            })
            .collect();
        Self::new(group, SemisimpleAlgebra::new(vec![crate::algebra::Block::real(2)])?, values)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn algebra(&self) -> &SemisimpleAlgebra {
        &self.algebra
    }

    pub fn values(&self) -> &[AlgebraElement] {
        &self.values
    }

    pub fn value(&self, g: usize) -> &AlgebraElement {
        &self.values[g]
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `max_g |phi(g)|`.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.operator_norm()).fold(0.0, f64::max)
    }

    /// `max_{s,t} |phi(st) - phi(s) phi(t)|` over all `|G|^2` pairs.
    pub fn defect(&self) -> f64 {
        let g = &self.group;
        let mut worst: f64 = 0.0;
        for s in g.elements() {
            for t in g.elements() {
                let d = self.values[g.mul(s, t)].distance(&(&self.values[s] * &self.values[t]));
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Linear extension `delta_g -> phi(g)` to the group algebra.
    pub fn linearize(&self) -> LinearMap {
        LinearMap::new(
            BasisAlgebra::Group(GroupAlgebra::new(self.group.clone())),
            self.algebra.clone(),
            self.values.clone(),
        )
        .expect("one value per group element")
    }

    /// `g -> T(phi(g))`.
    pub fn push_forward(&self, map: &LinearMap) -> Result<Representation> {
        let values = self.values.iter().map(|v| map.apply_element(v)).collect::<Result<Vec<_>>>()?;
        if map.source().as_matrix() != Some(&self.algebra) {
            return Err(Error::ShapeMismatch("map source differs from the representation's algebra".into()));
        }
        Self::new(self.group.clone(), map.target().clone(), values)
    }

    /// `g -> u phi(g) u^-1`.
    pub fn conjugate(&self, u: &AlgebraElement) -> Result<Representation> {
        self.algebra.check(u)?;
        let inv = u.inverse()?;
        let values = self.values.iter().map(|v| &(u * v) * &inv).collect();
        Self::new(self.group.clone(), self.algebra.clone(), values)
    }

    /// Displaces every `phi(g)`, `g != 1`, by a seeded random element of norm
    /// at most `eta`. Unitary representations are displaced along a
    /// skew-adjoint direction and retracted to the unitaries by polar
    /// projection, so they stay unitary.
    pub fn perturb(&self, eta: f64, seed: u64) -> Result<Representation> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::Precondition(format!("perturbation size {eta} must be finite and >= 0")));
        }
        if eta == 0.0 {
            return Ok(self.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(self.values.len());
        for (g, v) in self.values.iter().enumerate() {
            if g == self.group.identity() {
                values.push(v.clone());
                continue;
            }
            let next = if self.unitary {
                let k = unit_direction(self.algebra.random_skew(&mut rng));
                let moved = v * &(&v.identity_like() + &k.scale_real(eta));
                if moved.min_singular_value() <= SINGULAR {
                    return Err(Error::PerturbationTooLarge { eta, element: g });
                }
                polar_decompose(&moved)?.0
            } else {
                let n = unit_direction(self.algebra.random_element(&mut rng));
                v + &n.scale_real(eta)
            };
            if next.min_singular_value() <= SINGULAR {
                return Err(Error::PerturbationTooLarge { eta, element: g });
            }
            values.push(next);
        }
        Self::new(self.group.clone(), self.algebra.clone(), values)
    }
}

fn unit_direction(x: AlgebraElement) -> AlgebraElement {
    let n = x.operator_norm();
    if n > 0.0 {
        x.scale_real(1.0 / n)
    } else {
        x
    }
}

pub fn rep_defect(phi: &Representation) -> f64 {
    phi.defect()
}

/// `max_g |phi1(g) - phi2(g)|`.
pub fn rep_distance(phi1: &Representation, phi2: &Representation) -> Result<f64> {
    if phi1.group != phi2.group {
        return Err(Error::ShapeMismatch("representations of different groups".into()));
    }
    if phi1.algebra != phi2.algebra {
        return Err(Error::ShapeMismatch("representations into different algebras".into()));
    }
    Ok(phi1.values.iter().zip(&phi2.values).map(|(a, b)| a.distance(b)).fold(0.0, f64::max))
}

/// `g -> psi(delta_g)` for a map out of the group algebra of `group` that is
/// multiplicative on basis pairs to within 1e-8.
pub fn restrict_to_group(psi: &LinearMap, group: &Arc<FiniteGroup>) -> Result<Representation> {
    match psi.source() {
        BasisAlgebra::Group(ga) if ga.group() == group => {}
        _ => return Err(Error::ShapeMismatch("map is not defined on this group algebra".into())),
    }
    let defect = basis_defect(psi);
    if !(defect <= RESTRICT_DEFECT_THRESHOLD) {
        return Err(Error::DefectAboveThreshold { defect, threshold: RESTRICT_DEFECT_THRESHOLD });
    }
    Representation::new(group.clone(), psi.target().clone(), psi.images().to_vec())
}
