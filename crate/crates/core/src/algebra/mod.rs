//! Finite-dimensional semisimple algebras realized as direct sums of real
//! and complex matrix blocks, together with the linear maps and diagonals
//! that the correction engines consume.
//!
//! The canonical basis of a [`SemisimpleAlgebra`] lists the matrix units of
//! each block in row-major order, blocks in declaration order. Every
//! coefficient array in the crate is expressed in that basis.

mod basis;
mod diagonal;
mod element;
mod linear_map;
pub(crate) mod norm_estimate;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub use basis::{group_algebra, BasisAlgebra, GroupAlgebra};
pub use diagonal::{diagonal, Diagonal};
pub use element::AlgebraElement;
pub use linear_map::LinearMap;
pub use norm_estimate::NormInterval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// One `n x n` matrix block over `field`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub field: Field,
    pub n: usize,
}

impl Block {
    pub fn real(n: usize) -> Self {
        Block { field: Field::Real, n }
    }

    pub fn complex(n: usize) -> Self {
        Block { field: Field::Complex, n }
    }
}

/// Wire form of an algebra: `{"blocks":[{"field":"complex","n":2}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub blocks: Vec<Block>,
}

/// A finite direct sum of full matrix algebras over the reals or complexes,
/// normed by the largest singular value over all blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraDescriptor", into = "AlgebraDescriptor")]
pub struct SemisimpleAlgebra {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    dim: usize,
}

impl TryFrom<AlgebraDescriptor> for SemisimpleAlgebra {
    type Error = Error;

    fn try_from(desc: AlgebraDescriptor) -> Result<Self> {
        SemisimpleAlgebra::new(desc.blocks)
    }
}

impl From<SemisimpleAlgebra> for AlgebraDescriptor {
    fn from(alg: SemisimpleAlgebra) -> Self {
        AlgebraDescriptor { blocks: alg.blocks }
    }
}

impl SemisimpleAlgebra {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyAlgebra);
        }
        if let Some(index) = blocks.iter().position(|b| b.n == 0) {
            return Err(Error::ZeroBlockDimension { index });
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dim = 0;
        for b in &blocks {
            offsets.push(dim);
            dim += b.n * b.n;
        }
        Ok(SemisimpleAlgebra { blocks, offsets, dim })
    }

    /// `M_n(C)`.
    pub fn matrix(n: usize) -> Result<Self> {
        Self::new(vec![Block::complex(n)])
    }

    /// The complex numbers as a one-block algebra.
    pub fn scalars() -> Self {
        Self::new(vec![Block::complex(1)]).expect("valid block")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total linear dimension, the sum of `n^2` over blocks.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sum of block sizes; bounds `|x|_F <= sqrt(rank) |x|`.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.n).sum()
    }

    pub fn block_offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    pub fn basis_index(&self, block: usize, row: usize, col: usize) -> usize {
        self.offsets[block] + row * self.blocks[block].n + col
    }

    /// Inverse of [`Self::basis_index`].
    pub fn basis_position(&self, index: usize) -> (usize, usize, usize) {
        let block = match self.offsets.binary_search(&index) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let n = self.blocks[block].n;
        let local = index - self.offsets[block];
        (block, local / n, local % n)
    }

    pub fn is_real_coordinate(&self, index: usize) -> bool {
        let (block, _, _) = self.basis_position(index);
        self.blocks[block].field == Field::Real
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::from_blocks(self.blocks.iter().map(|b| DMatrix::zeros(b.n, b.n)).collect())
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement::from_blocks(self.blocks.iter().map(|b| DMatrix::identity(b.n, b.n)).collect())
    }

    pub fn basis_element(&self, index: usize) -> AlgebraElement {
        let (block, row, col) = self.basis_position(index);
        let mut el = self.zero();
        el.blocks_mut()[block][(row, col)] = C64::new(1.0, 0.0);
        el
    }

    pub fn element_from_coeffs(&self, coeffs: &[C64]) -> AlgebraElement {
        assert_eq!(coeffs.len(), self.dim, "coefficient vector length");
        let blocks = self
            .blocks
            .iter()
            .zip(&self.offsets)
            .map(|(b, &off)| DMatrix::from_fn(b.n, b.n, |r, c| coeffs[off + r * b.n + c]))
            .collect();
        AlgebraElement::from_blocks(blocks)
    }

    pub fn coeffs(&self, el: &AlgebraElement) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dim);
        for m in el.blocks() {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    out.push(m[(r, c)]);
                }
            }
        }
        out
    }

    /// Block shapes match and real blocks carry no imaginary parts.
    pub fn contains(&self, el: &AlgebraElement) -> bool {
        el.blocks().len() == self.blocks.len()
            && self.blocks.iter().zip(el.blocks()).all(|(b, m)| {
                m.nrows() == b.n
                    && m.ncols() == b.n
                    && (b.field == Field::Complex || m.iter().all(|z| z.im == 0.0))
            })
    }

    pub fn check(&self, el: &AlgebraElement) -> Result<()> {
        if self.contains(el) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "element does not belong to algebra {:?}",
                self.blocks
            )))
        }
    }

    /// Entries drawn from a standard normal distribution (real parts only on
    /// real blocks).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                DMatrix::from_fn(b.n, b.n, |_, _| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = match b.field {
                        Field::Real => 0.0,
                        Field::Complex => rng.sample(StandardNormal),
                    };
                    C64::new(re, im)
                })
            })
            .collect();
        AlgebraElement::from_blocks(blocks)
    }

    /// Random skew-adjoint element (skew-symmetric on real blocks).
    pub fn random_skew<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        let x = self.random_element(rng);
        (&x - &x.adjoint()).scale(C64::new(0.5, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_of_small_algebras() {
        assert_eq!(SemisimpleAlgebra::new(vec![Block::complex(1)]).unwrap().dim(), 1);
        let a = SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(3)]).unwrap();
        assert_eq!(a.dim(), 13);
        assert_eq!(SemisimpleAlgebra::new(vec![Block::real(2)]).unwrap().dim(), 4);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(SemisimpleAlgebra::new(vec![]), Err(Error::EmptyAlgebra)));
        assert!(matches!(
            SemisimpleAlgebra::new(vec![Block::complex(2), Block::real(0)]),
            Err(Error::ZeroBlockDimension { index: 1 })
        ));
    }

    #[test]
    fn basis_enumeration_is_row_major_by_block() {
        let a = SemisimpleAlgebra::new(vec![Block::complex(2), Block::complex(3)]).unwrap();
        assert_eq!(a.basis_index(0, 1, 0), 2);
        assert_eq!(a.basis_index(1, 0, 0), 4);
        assert_eq!(a.basis_index(1, 2, 1), 4 + 7);
        for i in 0..a.dim() {
            let (b, r, c) = a.basis_position(i);
            assert_eq!(a.basis_index(b, r, c), i);
        }
    }

    #[test]
    fn coefficient_round_trip() {
        let a = SemisimpleAlgebra::new(vec![Block::complex(2), Block::real(3)]).unwrap();
        let mut rng = rand::rng();
        let x = a.random_element(&mut rng);
        assert!(a.contains(&x));
        let back = a.element_from_coeffs(&a.coeffs(&x));
        assert_eq!(back, x);
    }

    #[test]
    fn json_descriptor() {
        let a: SemisimpleAlgebra =
            serde_json::from_str(r#"{"blocks":[{"field":"complex","n":2}]}"#).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"blocks":[{"field":"complex","n":2}]}"#
        );
        assert!(serde_json::from_str::<SemisimpleAlgebra>(r#"{"blocks":[]}"#).is_err());
    }
}
