//! Numerical stabilization of approximate representations of finite groups
//! and approximately multiplicative maps between semisimple algebras, with
//! supporting tools for finite-dimensional Banach geometry, colimit towers
//! of algebras and finitely supported measures.

pub mod algebra;
pub mod banach;
pub mod colimit;
pub mod error;
pub mod group;
pub mod measure;
pub mod stabilization;
pub mod tolerance;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
