//! Default numerical tolerances.
//!
//! Algebraic identities (products, unit, commutation) are held to
//! [`ALGEBRAIC`]; quantities obtained by optimization or sampling are held
//! to [`OPTIMIZED`]. Call sites accept overrides where it matters.

/// Identities that hold exactly in exact arithmetic.
pub const ALGEBRAIC: f64 = 1e-12;

/// Values produced by iterative ascent, refinement or search.
pub const OPTIMIZED: f64 = 1e-6;

/// A representation is flagged exact when its defect is at most this.
pub const EXACT_REPRESENTATION: f64 = 1e-10;

/// A value is flagged unitary when `|x*x - 1|` is at most this.
pub const UNITARY: f64 = 1e-10;

/// Smallest singular value below which an element counts as singular.
pub const SINGULAR: f64 = 1e-8;

/// Largest group order accepted by [`crate::group::FiniteGroup`].
pub const MAX_GROUP_ORDER: usize = 64;
