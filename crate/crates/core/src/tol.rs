//! Tolerances shared across the crate.

/// Algebraic identities (commutators, Hermiticity, normalization).
pub const ALGEBRAIC: f64 = 1e-10;

/// Positivity of variances and density-matrix eigenvalues.
pub const POSITIVITY: f64 = 1e-8;

/// Relative tolerance for golden-section refinements.
pub const GOLDEN: f64 = 1e-6;

/// Largest dimension handled with dense eigendecompositions.
pub const DENSE_MAX_DIM: usize = 512;

/// Cap on distinguishable per-site tensor-product spaces.
pub const PER_SITE_MAX_DIM: usize = 4096;
