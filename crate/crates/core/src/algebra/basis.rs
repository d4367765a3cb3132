use std::sync::Arc;

use nalgebra::DMatrix;

use super::element::spectral_norm;
use super::{Diagonal, Field, SemisimpleAlgebra};
use crate::group::FiniteGroup;
use crate::C64;

/// The complex group algebra `C[G]` with basis `{delta_g}` and convolution
/// product, normed through its left regular representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebra {
    group: Arc<FiniteGroup>,
}

impl GroupAlgebra {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        GroupAlgebra { group }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Matrix of left multiplication by `a` on `l^2(G)`.
    pub fn regular_matrix(&self, a: &[C64]) -> DMatrix<C64> {
        let g = &self.group;
        let n = g.order();
        let mut m = DMatrix::zeros(n, n);
        for (x, &ax) in a.iter().enumerate() {
            if ax == C64::new(0.0, 0.0) {
                continue;
            }
            for h in 0..n {
                m[(g.mul(x, h), h)] += ax;
            }
        }
        m
    }
}

/// An algebra with a distinguished basis in which the product of two basis
/// elements is zero or again a basis element, and the adjoint permutes the
/// basis. Both matrix-unit bases and group bases have this shape; it is the
/// source type of every [`super::LinearMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisAlgebra {
    Matrix(SemisimpleAlgebra),
    Group(GroupAlgebra),
}

impl From<SemisimpleAlgebra> for BasisAlgebra {
    fn from(a: SemisimpleAlgebra) -> Self {
        BasisAlgebra::Matrix(a)
    }
}

impl BasisAlgebra {
    pub fn dim(&self) -> usize {
        match self {
            BasisAlgebra::Matrix(a) => a.dim(),
            BasisAlgebra::Group(g) => g.group.order(),
        }
    }

    pub fn as_matrix(&self) -> Option<&SemisimpleAlgebra> {
        match self {
            BasisAlgebra::Matrix(a) => Some(a),
            BasisAlgebra::Group(_) => None,
        }
    }

    pub fn as_group(&self) -> Option<&GroupAlgebra> {
        match self {
            BasisAlgebra::Group(g) => Some(g),
            BasisAlgebra::Matrix(_) => None,
        }
    }

    /// `b_i b_j` as a basis index, or `None` when the product vanishes.
    pub fn basis_product(&self, i: usize, j: usize) -> Option<usize> {
        match self {
            BasisAlgebra::Matrix(a) => {
                let (bi, ri, ci) = a.basis_position(i);
                let (bj, rj, cj) = a.basis_position(j);
                (bi == bj && ci == rj).then(|| a.basis_index(bi, ri, cj))
            }
            BasisAlgebra::Group(g) => Some(g.group.mul(i, j)),
        }
    }

    /// Index of `b_i*`.
    pub fn basis_star(&self, i: usize) -> usize {
        match self {
            BasisAlgebra::Matrix(a) => {
                let (b, r, c) = a.basis_position(i);
                a.basis_index(b, c, r)
            }
            BasisAlgebra::Group(g) => g.group.inv(i),
        }
    }

    /// Coordinates that must stay real (real matrix blocks).
    pub fn is_real_coordinate(&self, i: usize) -> bool {
        match self {
            BasisAlgebra::Matrix(a) => a.is_real_coordinate(i),
            BasisAlgebra::Group(_) => false,
        }
    }

    pub fn unit(&self) -> Vec<C64> {
        let mut u = vec![C64::new(0.0, 0.0); self.dim()];
        match self {
            BasisAlgebra::Matrix(a) => {
                for (b, block) in a.blocks().iter().enumerate() {
                    for k in 0..block.n {
                        u[a.basis_index(b, k, k)] = C64::new(1.0, 0.0);
                    }
                }
            }
            BasisAlgebra::Group(g) => u[g.group.identity()] = C64::new(1.0, 0.0),
        }
        u
    }

    pub fn basis_vector(&self, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn mul(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, &xi) in x.iter().enumerate().filter(|(_, z)| z.norm_sqr() != 0.0) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, z)| z.norm_sqr() != 0.0) {
                if let Some(k) = self.basis_product(i, j) {
                    out[k] += xi * yj;
                }
            }
        }
        out
    }

    pub fn star(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, &xi) in x.iter().enumerate() {
            out[self.basis_star(i)] = xi.conj();
        }
        out
    }

    /// The C*-norm: blockwise spectral norm, or the norm of the left regular
    /// representation for group algebras.
    pub fn norm(&self, x: &[C64]) -> f64 {
        match self {
            BasisAlgebra::Matrix(a) => a.element_from_coeffs(x).operator_norm(),
            BasisAlgebra::Group(g) => spectral_norm(&g.regular_matrix(x)),
        }
    }

    /// Real-field flags per block, used to clean up images in real blocks.
    pub(crate) fn real_blocks(a: &SemisimpleAlgebra) -> impl Iterator<Item = bool> + '_ {
        a.blocks().iter().map(|b| b.field == Field::Real)
    }
}

/// The group algebra of `group` together with its canonical diagonal
/// `(1/|G|) sum_g delta_g (x) delta_{g^-1}`.
pub fn group_algebra(group: Arc<FiniteGroup>) -> (BasisAlgebra, Diagonal) {
    let alg = BasisAlgebra::Group(GroupAlgebra::new(group));
    let diag = Diagonal::canonical(&alg);
    (alg, diag)
}
