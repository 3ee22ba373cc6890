//! Brute-force lattice estimation of the convolution-constraint sets
//! behind the block bounds.
//!
//! For a target `(xi, mu, tau)` and shells `(N1, N2, L1, L2)`,
//!
//! `A = { (xi1, mu1, tau1) : signs, |(xi1,mu1)| in [N1, 2N1),`
//! `      |(xi-xi1, mu-mu1)| in [N2, 2N2), |tau1 - omega1| < 2 L1,`
//! `      |tau - tau1 - omega2| < 2 L2 }`
//!
//! counted on an `h`-lattice with cell measure `h^3`. Spatial shells are
//! sharp dyadic annuli; modulation constraints are balls (so shrinking an
//! `L` shell is a set inclusion). The companion 2D set `B` replaces the
//! two modulation constraints by `|tau - omega(xi,mu) + H| <= 4 max(L1, L2)`
//! and is counted with cell measure `h^2`, per slice of `mu1` for the
//! one-variable bound.

use super::{in_cone, resonance, SignSet};
use crate::error::{Error, Result};
use crate::grid::{aniso_modulus, omega};

#[derive(Debug, Clone, Copy)]
pub struct MeasureQuery {
    /// Output frequency-modulation target.
    pub xi: f64,
    pub mu: f64,
    pub tau: f64,
    pub n1: u64,
    pub n2: u64,
    pub l1: u64,
    pub l2: u64,
    /// Lattice spacing; must satisfy `h <= min(N1, N2) / 16`.
    pub h: f64,
    pub sign_set: SignSet,
    /// Cone restriction applied to both input frequencies when set.
    pub cone_alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureCounts {
    pub a_count: u64,
    /// `a_count * h^3`.
    pub a_estimate: f64,
    pub b_count: u64,
    /// `b_count * h^2`.
    pub b_estimate: f64,
    /// Largest single-`mu1` slice of `B`, times `h` (the one-variable bound).
    pub b_max_slice: f64,
}

pub fn count_measure_a(q: &MeasureQuery) -> Result<MeasureCounts> {
    let limit = (q.n1.min(q.n2) as f64) / 16.0;
    if q.h > limit {
        return Err(Error::Resolution { h: q.h, limit });
    }
    let (n1, n2) = (q.n1 as f64, q.n2 as f64);
    let (l1, l2) = (q.l1 as f64, q.l2 as f64);
    // |(xi1, mu1)| in [N1, 2N1) forces |xi1| <= 2 N1 / sqrt(3), |mu1| <= 2 N1.
    let xi_max = 2.0 * n1 / 3f64.sqrt();
    let mu_max = 2.0 * n1;
    let range = |vmax: f64| -> std::ops::RangeInclusive<i64> {
        let k = (vmax / q.h).ceil() as i64;
        -k..=k
    };
    let b_mod_limit = 4.0 * l1.max(l2);
    let mut counts = MeasureCounts::default();
    let mut slice_best: u64 = 0;
    for jmu in range(mu_max) {
        let mu1 = jmu as f64 * q.h;
        let mu2 = q.mu - mu1;
        let mut slice_count: u64 = 0;
        for jxi in range(xi_max) {
            let xi1 = jxi as f64 * q.h;
            let xi2 = q.xi - xi1;
            let r1 = aniso_modulus(xi1, mu1);
            if !(n1 <= r1 && r1 < 2.0 * n1) {
                continue;
            }
            let r2 = aniso_modulus(xi2, mu2);
            if !(n2 <= r2 && r2 < 2.0 * n2) {
                continue;
            }
            if !q.sign_set.contains(xi1, xi2, mu1, mu2) {
                continue;
            }
            if let Some(alpha) = q.cone_alpha {
                if !(in_cone(xi1, mu1, alpha) && in_cone(xi2, mu2, alpha)) {
                    continue;
                }
            }
            // B membership: the resonance identity folds both modulation
            // constraints into one inequality on the output modulation.
            let res = resonance((xi1, mu1), (xi2, mu2));
            if (q.tau - omega(q.xi, q.mu) + res).abs() <= b_mod_limit {
                counts.b_count += 1;
                slice_count += 1;
            }
            // A membership: tau1 within both modulation balls
            let w1 = omega(xi1, mu1);
            let w2 = omega(xi2, mu2);
            let lo = (w1 - 2.0 * l1).max(q.tau - w2 - 2.0 * l2);
            let hi = (w1 + 2.0 * l1).min(q.tau - w2 + 2.0 * l2);
            if lo <= hi {
                let k_lo = (lo / q.h).ceil() as i64;
                let k_hi = (hi / q.h).floor() as i64;
                if k_hi >= k_lo {
                    counts.a_count += (k_hi - k_lo + 1) as u64;
                }
            }
        }
        slice_best = slice_best.max(slice_count);
    }
    counts.a_estimate = counts.a_count as f64 * q.h.powi(3);
    counts.b_estimate = counts.b_count as f64 * q.h.powi(2);
    counts.b_max_slice = slice_best as f64 * q.h;
    Ok(counts)
}
