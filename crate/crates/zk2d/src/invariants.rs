//! Conserved quantities and the H^1 a-priori bound.
//!
//! Mass `M(u) = 1/2 integral u^2` and energy
//! `E(u) = 1/2 integral (|grad u|^2 - u^3 / 3)` are preserved by the flow;
//! together they bound the H^1 norm, which is what makes every constant
//! downstream depend only on the conserved level.

use crate::error::{Error, Result};
use crate::field::RealField2D;
use crate::grid::{MultiIndex, Multiplier};

/// `M(u) = 1/2 integral u^2 dx dy`.
pub fn mass(u: &RealField2D) -> f64 {
    0.5 * u.l2_norm().powi(2)
}

/// `E(u) = 1/2 integral |grad u|^2 - 1/3 integral u^3`.
///
/// The cubic coefficient is fixed by conservation: for
/// `u_t + d/dx(Laplace(u) + u^2) = 0` one has
/// `dE/dt = (1 - 3c) integral Laplace(u) d/dx(u^2)` when the cubic term is
/// `-c integral u^3`, so only `c = 1/3` is invariant.
///
/// The gradient term is spectral; the cubic term is grid quadrature.
pub fn energy(u: &RealField2D) -> f64 {
    let ux = u
        .apply_multiplier(&Multiplier::Partial(MultiIndex::new(1, 0)))
        .expect("derivative is total");
    let uy = u
        .apply_multiplier(&Multiplier::Partial(MultiIndex::new(0, 1)))
        .expect("derivative is total");
    let grad_sq = ux.l2_norm().powi(2) + uy.l2_norm().powi(2);
    let w = u.grid().cell_weight();
    let cubic: f64 = u.values().iter().map(|v| v * v * v).sum::<f64>() * w;
    0.5 * grad_sq - cubic / 3.0
}

/// Empirical probe of `||u||_{H^1}^2 <= C (1 + E(u) + M(u)^2)`: returns the
/// measured ratio. `Inapplicable` when the denominator is not positive.
pub fn gn_h1_bound_check(u: &RealField2D) -> Result<f64> {
    let denom = 1.0 + energy(u) + mass(u).powi(2);
    if denom <= 0.0 {
        return Err(Error::Inapplicable("nonpositive 1 + E + M^2"));
    }
    Ok(u.sobolev_norm(1.0).powi(2) / denom)
}

/// One diagnostics row along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct ConservedRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h1: f64,
    pub hs: f64,
    pub gn_ratio: f64,
}

impl ConservedRecord {
    /// Evaluate all diagnostics at one snapshot; `s` is the tracked index.
    pub fn measure(t: f64, u: &RealField2D, s: f64) -> Self {
        Self {
            t,
            mass: mass(u),
            energy: energy(u),
            h1: u.sobolev_norm(1.0),
            hs: u.sobolev_norm(s),
            gn_ratio: gn_h1_bound_check(u).unwrap_or(f64::NAN),
        }
    }
}
