use nalgebra::DMatrix;

use super::norm_estimate::{self, NormInterval, DEFAULT_RESTARTS};
use super::{AlgebraElement, BasisAlgebra, SemisimpleAlgebra};
use crate::error::{Error, Result};
use crate::C64;

/// A linear map from a [`BasisAlgebra`] into a [`SemisimpleAlgebra`],
/// determined by the images of the source basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    source: BasisAlgebra,
    target: SemisimpleAlgebra,
    images: Vec<AlgebraElement>,
}

impl LinearMap {
    pub fn new(source: BasisAlgebra, target: SemisimpleAlgebra, images: Vec<AlgebraElement>) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} images for a source of dimension {}",
                images.len(),
                source.dim()
            )));
        }
        for im in &images {
            target.check(im)?;
        }
        Ok(LinearMap { source, target, images })
    }

    /// Images read off the columns of a `target.dim() x source.dim()` array.
    pub fn from_coefficients(source: BasisAlgebra, target: SemisimpleAlgebra, coeffs: &DMatrix<C64>) -> Result<Self> {
        if coeffs.nrows() != target.dim() || coeffs.ncols() != source.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient array is {}x{}, expected {}x{}",
                coeffs.nrows(),
                coeffs.ncols(),
                target.dim(),
                source.dim()
            )));
        }
        let images = (0..source.dim())
            .map(|j| target.element_from_coeffs(coeffs.column(j).as_slice()))
            .collect();
        Self::new(source, target, images)
    }

    pub fn identity(alg: &SemisimpleAlgebra) -> Self {
        let images = (0..alg.dim()).map(|i| alg.basis_element(i)).collect();
        LinearMap { source: BasisAlgebra::Matrix(alg.clone()), target: alg.clone(), images }
    }

    pub fn zero(source: BasisAlgebra, target: SemisimpleAlgebra) -> Self {
        let images = vec![target.zero(); source.dim()];
        LinearMap { source, target, images }
    }

    pub fn source(&self) -> &BasisAlgebra {
        &self.source
    }

    pub fn target(&self) -> &SemisimpleAlgebra {
        &self.target
    }

    pub fn images(&self) -> &[AlgebraElement] {
        &self.images
    }

    pub fn image(&self, basis_index: usize) -> &AlgebraElement {
        &self.images[basis_index]
    }

    pub(crate) fn images_mut(&mut self) -> &mut [AlgebraElement] {
        &mut self.images
    }

    /// Column `j` holds the target coefficients of the image of basis `j`.
    pub fn coefficient_array(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.target.dim(), self.source.dim());
        for (j, im) in self.images.iter().enumerate() {
            for (i, z) in self.target.coeffs(im).into_iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn apply(&self, x: &[C64]) -> AlgebraElement {
        let mut out = self.target.zero();
        for (xi, im) in x.iter().zip(&self.images) {
            if xi.norm_sqr() != 0.0 {
                out = &out + &im.scale(*xi);
            }
        }
        out
    }

    /// Image of an element of a matrix-algebra source.
    pub fn apply_element(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let src = self
            .source
            .as_matrix()
            .ok_or_else(|| Error::Precondition("source is not a matrix algebra".into()))?;
        src.check(x)?;
        Ok(self.apply(&src.coeffs(x)))
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        if self.source.as_matrix() != Some(&inner.target) {
            return Err(Error::ShapeMismatch("composition of incompatible maps".into()));
        }
        let images = inner
            .images
            .iter()
            .map(|im| self.apply(&inner.target.coeffs(im)))
            .collect();
        Ok(LinearMap { source: inner.source.clone(), target: self.target.clone(), images })
    }

    pub fn scale(&self, z: C64) -> LinearMap {
        LinearMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self.images.iter().map(|m| m.scale(z)).collect(),
        }
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap> {
        self.check_same_spaces(other)?;
        Ok(LinearMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &LinearMap) -> Result<LinearMap> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    fn check_same_spaces(&self, other: &LinearMap) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("maps have different source or target".into()));
        }
        Ok(())
    }

    /// `max_b |T(b) - S(b)|` over source basis elements.
    pub fn basis_distance(&self, other: &LinearMap) -> Result<f64> {
        self.check_same_spaces(other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }

    /// `|T(1) - 1|`.
    pub fn unit_residual(&self) -> f64 {
        self.apply(&self.source.unit()).distance(&self.target.identity())
    }

    /// Operator-norm interval for the map between the C*-normed algebras.
    pub fn norm_estimate(&self) -> NormInterval {
        self.norm_estimate_with_restarts(DEFAULT_RESTARTS)
    }

    pub fn norm_estimate_with_restarts(&self, restarts: usize) -> NormInterval {
        norm_estimate::estimate(&self.source, &self.target, &self.coefficient_array(), restarts)
    }
}
