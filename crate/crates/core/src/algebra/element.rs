use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Wire form: one entry per block, each a list of rows of `[re, im]` pairs.
type ElementWire = Vec<Vec<Vec<[f64; 2]>>>;

/// An element of a [`super::SemisimpleAlgebra`]: one square complex matrix
/// per block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ElementWire", into = "ElementWire")]
pub struct AlgebraElement {
    blocks: Vec<DMatrix<C64>>,
}

impl From<ElementWire> for AlgebraElement {
    fn from(wire: ElementWire) -> Self {
        let blocks = wire
            .into_iter()
            .map(|rows| {
                let n = rows.len();
                DMatrix::from_fn(n, n, |r, c| {
                    let [re, im] = rows[r].get(c).copied().unwrap_or([f64::NAN, f64::NAN]);
                    C64::new(re, im)
                })
            })
            .collect();
        AlgebraElement { blocks }
    }
}

impl From<AlgebraElement> for ElementWire {
    fn from(el: AlgebraElement) -> Self {
        el.blocks
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect()
    }
}

impl AlgebraElement {
    pub fn from_blocks(blocks: Vec<DMatrix<C64>>) -> Self {
        AlgebraElement { blocks }
    }

    /// Single-block element from a complex matrix.
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        AlgebraElement { blocks: vec![m] }
    }

    /// Single-block element from a real matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_matrix(DMatrix::from_fn(n, n, |r, c| C64::new(rows[r][c], 0.0)))
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_matrix(DMatrix::from_element(1, 1, z))
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [DMatrix<C64>] {
        &mut self.blocks
    }

    pub fn block(&self, i: usize) -> &DMatrix<C64> {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<DMatrix<C64>> {
        self.blocks
    }

    pub fn same_shape(&self, other: &AlgebraElement) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.shape() == b.shape())
    }

    /// Largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// Smallest singular value over all blocks; zero means not invertible.
    pub fn min_singular_value(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.clone().singular_values().min())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn distance(&self, other: &AlgebraElement) -> f64 {
        (self - other).operator_norm()
    }

    /// Largest entry modulus.
    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m.adjoint()).collect() }
    }

    pub fn scale(&self, z: C64) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m * z).collect() }
    }

    pub fn scale_real(&self, t: f64) -> AlgebraElement {
        self.scale(C64::new(t, 0.0))
    }

    pub fn identity_like(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|m| DMatrix::identity(m.nrows(), m.ncols())).collect(),
        }
    }

    pub fn inverse(&self) -> Result<AlgebraElement> {
        let smin = self.min_singular_value();
        if !(smin > crate::tolerance::SINGULAR) {
            return Err(Error::Singular { min_singular_value: smin });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                m.clone()
                    .try_inverse()
                    .ok_or(Error::Singular { min_singular_value: smin })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraElement { blocks })
    }

    /// `|x* x - 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let id = self.identity_like();
        (&(&self.adjoint() * self) - &id).operator_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Drop imaginary parts in the blocks flagged `true`.
    pub(crate) fn realify(mut self, real_blocks: impl Iterator<Item = bool>) -> AlgebraElement {
        for (m, is_real) in self.blocks.iter_mut().zip(real_blocks) {
            if is_real {
                m.iter_mut().for_each(|z| z.im = 0.0);
            }
        }
        self
    }

    /// `exp(x)` blockwise.
    pub fn exp(&self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m.exp()).collect() }
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        debug_assert!(self.same_shape(rhs));
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        debug_assert!(self.same_shape(rhs));
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        debug_assert!(self.same_shape(rhs));
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect() }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|m| -m).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Block, SemisimpleAlgebra};

    #[test]
    fn operator_norm_examples() {
        let m2 = SemisimpleAlgebra::matrix(2).unwrap();
        assert!((m2.identity().operator_norm() - 1.0).abs() < 1e-15);
        let d = AlgebraElement::from_real_rows(&[&[3.0, 0.0], &[0.0, -4.0]]);
        assert!((d.operator_norm() - 4.0).abs() < 1e-14);
        let e12 = m2.basis_element(m2.basis_index(0, 0, 1));
        assert!((e12.operator_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_norm_is_one_on_direct_sums() {
        let a = SemisimpleAlgebra::new(vec![Block::complex(2), Block::real(3), Block::complex(1)])
            .unwrap();
        assert!((a.identity().operator_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn submultiplicative_on_random_pairs() {
        let a = SemisimpleAlgebra::new(vec![Block::complex(2), Block::real(3)]).unwrap();
        let mut rng = rand::rng();
        for _ in 0..1000 {
            let x = a.random_element(&mut rng);
            let y = a.random_element(&mut rng);
            let lhs = (&x * &y).operator_norm();
            assert!(lhs <= x.operator_norm() * y.operator_norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn wire_format_is_nested_pairs() {
        let x = AlgebraElement::from_blocks(vec![DMatrix::from_element(1, 1, C64::new(0.5, -1.0))]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[[[0.5,-1.0]]]]");
        let back: AlgebraElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let x = AlgebraElement::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(x.inverse(), Err(Error::Singular { .. })));
    }
}
