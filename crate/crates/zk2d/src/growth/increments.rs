//! Decomposition of the instantaneous H^s variation into derivative
//! pairings.
//!
//! Expanding the Sobolev weight multinomially,
//! `<|(xi,mu)|>^{2s} = sum_{|i| <= s} c_i xi^{2 i1} mu^{2 i2}` with
//! `c_i = s! / ((s-|i|)! i1! i2!) 3^{i1}`, gives
//!
//! `d/dt ||u||_{H^s}^2 = sum_i 2 c_i integral (d^i u)(d^i w)`,
//! `w = -d/dx P(u^2)`,
//!
//! where `d^i` are the signed (Leibniz-compatible) derivatives. Each term
//! splits over the Leibniz expansion of `d^i(u^2)`; the buckets are
//! `I0` (no derivatives — vanishes identically), `I_mid` (0 < |i| < s),
//! `I_s^1` (|i| = s, derivatives split), and `I_s^2` (|i| = s, all
//! derivatives on one factor).

use crate::dynamics::nonlinear_term;
use crate::error::{Error, Result};
use crate::field::RealField2D;
use crate::grid::{MultiIndex, Multiplier};
use crate::xsb::SpaceTimeField;
use std::collections::HashMap;

/// One evaluation of the increment decomposition.
#[derive(Debug, Clone, Copy)]
pub struct IncrementReport {
    pub t: f64,
    pub i0: f64,
    pub i_mid: f64,
    pub i_s1: f64,
    pub i_s2: f64,
    /// `i0 + i_mid + i_s1 + i_s2`, the reconstructed `d/dt ||u||_{H^s}^2`.
    pub total: f64,
    /// Centered finite difference of `||u||_{H^s}^2` from the trajectory
    /// (NaN at the window ends).
    pub hs_derivative: f64,
}

/// Multinomial weight of `xi^{2 i1} mu^{2 i2}` in `<|(xi,mu)|>^{2s}`.
pub fn sobolev_weight_coefficient(s: u32, i: MultiIndex) -> f64 {
    let a = s - i.len();
    factorial(s) / (factorial(a) * factorial(i.i1) * factorial(i.i2)) * 3f64.powi(i.i1 as i32)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

fn binomial(i: MultiIndex, j: MultiIndex) -> f64 {
    factorial(i.i1) / (factorial(j.i1) * factorial(i.i1 - j.i1)) * factorial(i.i2)
        / (factorial(j.i2) * factorial(i.i2 - j.i2))
}

/// `d/dt ||u||_{H^s}^2` evaluated directly in frequency space:
/// `2 sum_k <k>^{2s} Re(conj(c_u) c_w)` — the reference the bucketed
/// decomposition must reproduce.
pub fn hs_flux(u: &RealField2D, s: f64) -> f64 {
    let w = nonlinear_term(u);
    let grid = u.grid();
    let cu = u.coeffs();
    let cw = w.coeffs();
    let mut sum = 0.0;
    for ((jx, jy), a) in cu.indexed_iter() {
        let b = cw[[jx, jy]];
        let weight = crate::grid::aniso_bracket(grid.xi(jx), grid.mu(jy)).powf(2.0 * s);
        sum += weight * 2.0 * (a.conj() * b).re;
    }
    sum * grid.area()
}

/// Evaluate the decomposition at sample `index` of a trajectory produced
/// by the full nonlinear flow.
pub fn increment_decomposition(
    traj: &SpaceTimeField,
    s: u32,
    index: usize,
) -> Result<IncrementReport> {
    increment_decomposition_with(traj, s, index, true)
}

/// As [`increment_decomposition`], but for trajectories of the linear
/// flow pass `nonlinear = false`: the governing quadratic term is then
/// identically zero and so is every bucket.
pub fn increment_decomposition_with(
    traj: &SpaceTimeField,
    s: u32,
    index: usize,
    nonlinear: bool,
) -> Result<IncrementReport> {
    assert!(s >= 2, "the decomposition needs integer s >= 2");
    let u = traj.slice(index);
    let grid = u.grid().clone();

    // resolution check: content outside the dealias band cannot be
    // differentiated consistently through grid products
    let total_mass: f64 = u.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let outside: f64 = u
        .coeffs()
        .indexed_iter()
        .filter(|((jx, jy), _)| !grid.in_dealias_band(*jx, *jy))
        .map(|(_, c)| c.norm_sqr())
        .sum();
    if outside > 1e-12 * total_mass.max(f64::MIN_POSITIVE) {
        return Err(Error::Unresolved {
            fraction: outside / total_mass,
        });
    }

    // all signed derivatives d^j u for j <= (s, s)
    let mut derivs: HashMap<(u32, u32), RealField2D> = HashMap::new();
    for i1 in 0..=s {
        for i2 in 0..=(s - i1) {
            let d = u.apply_multiplier(&Multiplier::Partial(MultiIndex::new(i1, i2)))?;
            derivs.insert((i1, i2), d);
        }
    }

    let dealias = |f: &RealField2D, g: &RealField2D| -> RealField2D {
        // physical product masked to the dealias band, then d/dx
        let mut prod = f.values() * g.values();
        let mut work = prod.mapv(|v| num_complex::Complex64::new(v, 0.0));
        grid.fft().forward(&mut work);
        for ((jx, jy), c) in work.indexed_iter_mut() {
            if grid.in_dealias_band(jx, jy) {
                *c *= num_complex::Complex64::new(0.0, grid.xi(jx));
            } else {
                *c = num_complex::Complex64::default();
            }
        }
        prod.fill(0.0);
        RealField2D::from_coeffs_scaled(&grid, work, f.max_abs() * g.max_abs())
    };

    let mut report = IncrementReport {
        t: traj.time(index),
        i0: 0.0,
        i_mid: 0.0,
        i_s1: 0.0,
        i_s2: 0.0,
        total: 0.0,
        hs_derivative: f64::NAN,
    };

    if nonlinear {
        for i1 in 0..=s {
            for i2 in 0..=(s - i1) {
                let i = MultiIndex::new(i1, i2);
                let ci = sobolev_weight_coefficient(s, i);
                let di_u = &derivs[&(i1, i2)];
                for j in i.divisors() {
                    let k = MultiIndex::new(i.i1 - j.i1, i.i2 - j.i2);
                    // term = -2 c_i binom(i, j) integral (d^i u) d/dx P(d^j u d^k u)
                    let dx_prod = dealias(&derivs[&(j.i1, j.i2)], &derivs[&(k.i1, k.i2)]);
                    let term = -2.0 * ci * binomial(i, j) * di_u.inner(&dx_prod);
                    if i.len() == 0 {
                        report.i0 += term;
                    } else if i.len() < s {
                        report.i_mid += term;
                    } else if j.len() == 0 || j == i {
                        report.i_s2 += term;
                    } else {
                        report.i_s1 += term;
                    }
                }
            }
        }
    }
    report.total = report.i0 + report.i_mid + report.i_s1 + report.i_s2;

    if index > 0 && index + 1 < traj.nt() {
        let dt = traj.dt();
        let plus = traj.slice(index + 1).sobolev_norm(s as f64).powi(2);
        let minus = traj.slice(index - 1).sobolev_norm(s as f64).powi(2);
        report.hs_derivative = (plus - minus) / (2.0 * dt);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_recording, SolverOptions};
    use crate::field::gaussian;
    use crate::grid::SpectralGrid;
    use std::f64::consts::PI;

    #[test]
    fn multinomial_expansion_reconstructs_bracket() {
        let mut state = 3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 6.0
        };
        for s in [2u32, 3, 4] {
            for _ in 0..50 {
                let (xi, mu) = (next(), next());
                let mut sum = 0.0;
                for i1 in 0..=s {
                    for i2 in 0..=(s - i1) {
                        let c = sobolev_weight_coefficient(s, MultiIndex::new(i1, i2));
                        sum += c * xi.powi(2 * i1 as i32) * mu.powi(2 * i2 as i32);
                    }
                }
                let expect = (1.0 + 3.0 * xi * xi + mu * mu).powi(s as i32);
                assert!(
                    (sum - expect).abs() <= 1e-12 * expect,
                    "s={s} xi={xi} mu={mu}: {sum} vs {expect}"
                );
            }
        }
    }

    fn short_run() -> SpaceTimeField {
        let g = SpectralGrid::new(48, 48, 8.0 * PI, 8.0 * PI);
        let f = gaussian(&g, 1.0, 2.0);
        integrate_recording(&f, 5e-4, 8, 1, SolverOptions::fixed(5e-4))
            .unwrap()
            .to_space_time()
    }

    #[test]
    fn i0_vanishes() {
        let traj = short_run();
        let r = increment_decomposition(&traj, 2, 4).unwrap();
        let scale = r.i_mid.abs() + r.i_s1.abs() + r.i_s2.abs() + 1e-300;
        assert!(r.i0.abs() <= 1e-10 * scale, "I0 = {:.3e} vs scale {scale:.3e}", r.i0);
    }

    #[test]
    fn bookkeeping_matches_spectral_flux() {
        let traj = short_run();
        let r = increment_decomposition(&traj, 2, 4).unwrap();
        let flux = hs_flux(&traj.slice(4), 2.0);
        assert!(
            (r.total - flux).abs() <= 1e-10 * flux.abs().max(1e-300),
            "bucketed {} vs spectral {}",
            r.total,
            flux
        );
    }

    #[test]
    fn total_matches_finite_difference() {
        let traj = short_run();
        let r = increment_decomposition(&traj, 2, 4).unwrap();
        assert!(
            (r.total - r.hs_derivative).abs() <= 1e-4 * r.hs_derivative.abs(),
            "total {} vs FD {}",
            r.total,
            r.hs_derivative
        );
    }

    #[test]
    fn linear_trajectory_all_terms_zero() {
        let g = SpectralGrid::new(48, 48, 8.0 * PI, 8.0 * PI);
        let f = gaussian(&g, 1.0, 2.0);
        let traj = integrate_recording(&f, 1e-3, 8, 1, SolverOptions::linear_only(1e-3))
            .unwrap()
            .to_space_time();
        let r = increment_decomposition_with(&traj, 2, 4, false).unwrap();
        assert_eq!(r.i0, 0.0);
        assert_eq!(r.i_mid, 0.0);
        assert_eq!(r.i_s1, 0.0);
        assert_eq!(r.i_s2, 0.0);
        // and the trajectory's H^s norm is indeed flat
        assert!(
            r.hs_derivative.abs()
                <= 1e-10 * traj.slice(4).sobolev_norm(2.0).powi(2) / traj.dt(),
            "linear flow H^s drift {:.3e}",
            r.hs_derivative
        );
    }
}
