//! Empirical verification machinery for the bilinear interaction bounds:
//! the resonance function, sign-set restricted convolutions, dyadic block
//! products, lattice measure counting, and randomized constant estimation.
//!
//! The lab works on an integer `(tau, xi, mu)` lattice over the box
//! `(2 pi)^3`, so frequencies coincide with indices and products of
//! lattice fields are exact convolutions on Z^3 (no wrap-around).

mod blocks;
mod constants;
mod measure;

pub use blocks::{
    block_correlation, block_product_ratio, exhaustive_basis_ratio, make_block, LabLattice,
    ProductMode, SparseField,
};
pub use constants::{bilinear_constant, random_smooth_coeffs, BilinearEstimate, BilinearParams};
pub use measure::{count_measure_a, MeasureCounts, MeasureQuery};

use crate::grid::{aniso_modulus, omega};

/// Resonance function
/// `H(p1, p2) = omega(p1 + p2) - omega(p1) - omega(p2)`:
/// the modulation mismatch created when two modes interact.
pub fn resonance(p1: (f64, f64), p2: (f64, f64)) -> f64 {
    omega(p1.0 + p2.0, p1.1 + p2.1) - omega(p1.0, p1.1) - omega(p2.0, p2.1)
}

/// `d/dmu1` of `H((xi1, mu1), (xi - xi1, mu - mu1))` at fixed sum;
/// its magnitude is `|2 xi1 mu1 - 2 xi2 mu2|`.
pub fn resonance_dmu1(xi1: f64, mu1: f64, xi2: f64, mu2: f64) -> f64 {
    2.0 * xi2 * mu2 - 2.0 * xi1 * mu1
}

/// `d/dxi1` of the same quantity: `|(xi2, mu2)|^2 - |(xi1, mu1)|^2` in the
/// anisotropic modulus.
pub fn resonance_dxi1(xi1: f64, mu1: f64, xi2: f64, mu2: f64) -> f64 {
    aniso_modulus(xi2, mu2).powi(2) - aniso_modulus(xi1, mu1).powi(2)
}

/// Sign-set domains of the high/high interaction lemma.
///
/// `S1 = {xi1 xi2 > 0, mu1 mu2 < 0} U {xi1 xi2 < 0, mu1 mu2 > 0}`;
/// `S2 = {xi1 xi2 < 0, mu1 mu2 < 0}`. Disjoint by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignSet {
    S1,
    S2,
}

impl SignSet {
    pub fn contains(&self, xi1: f64, xi2: f64, mu1: f64, mu2: f64) -> bool {
        let sx = xi1 * xi2;
        let sy = mu1 * mu2;
        match self {
            SignSet::S1 => (sx > 0.0 && sy < 0.0) || (sx < 0.0 && sy > 0.0),
            SignSet::S2 => sx < 0.0 && sy < 0.0,
        }
    }
}

/// True when `(xi, mu)` lies in the near-cone region
/// `(1-alpha)^(1/2) sqrt(3) |xi| <= |mu| <= (1-alpha)^(-1/2) sqrt(3) |xi|`.
pub fn in_cone(xi: f64, mu: f64, alpha: f64) -> bool {
    let s3 = 3f64.sqrt();
    let lo = (1.0 - alpha).sqrt() * s3 * xi.abs();
    let hi = s3 * xi.abs() / (1.0 - alpha).sqrt();
    lo <= mu.abs() && mu.abs() <= hi
}
