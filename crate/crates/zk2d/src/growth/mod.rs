//! Quantitative norm-growth toolkit: the existence-time formula of the
//! H^1-calibrated local theory, empirical amplification constants, the
//! H^s increment decomposition, the iteration-lemma certifier, and
//! polynomial-envelope fitting of norm histories.

mod increments;
mod lemma13;
pub mod wide;

pub use increments::{
    hs_flux, increment_decomposition, increment_decomposition_with, sobolev_weight_coefficient,
    IncrementReport,
};
pub use lemma13::{convexity_step_holds, lemma13_constants, lemma13_verify, GrowthEnvelope};

use crate::dynamics::{Solver, SolverOptions, TimeStep};
use crate::error::{Error, Result};
use crate::field::RealField2D;
use crate::xsb::{phi_t, SpaceTimeField};
use ndarray::{Array3, Axis};
use serde::{Deserialize, Serialize};

/// Parameters of the H^1-calibrated local theory.
///
/// `b = 1/2 + delta`, `b' = -1/2 + 2 delta`, `eps = rho / (s - 1)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LocalTheoryParams {
    /// Empirical fixed-point constant (calibrated, not derived).
    pub c0: f64,
    pub delta: f64,
    /// Integer Sobolev index >= 2.
    pub s: u32,
    pub rho: f64,
}

impl LocalTheoryParams {
    pub fn new(c0: f64, delta: f64, s: u32, rho: f64) -> Result<Self> {
        let p = Self { c0, delta, s, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) {
            return Err(Error::ParameterRange("C0 must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0 / 12.0) {
            return Err(Error::ParameterRange(format!(
                "delta must lie in (0, 1/12), got {}",
                self.delta
            )));
        }
        if self.s < 2 {
            return Err(Error::ParameterRange(format!("s must be >= 2, got {}", self.s)));
        }
        if !(self.rho > 0.0 && self.rho < 0.5 - 6.0 * self.delta) {
            return Err(Error::ParameterRange(format!(
                "rho must lie in (0, 1/2 - 6 delta), got {}",
                self.rho
            )));
        }
        let eps = self.eps();
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::ParameterRange(format!("eps = rho/(s-1) = {eps} not in (0, 1/2)")));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        0.5 + self.delta
    }

    pub fn b_prime(&self) -> f64 {
        -0.5 + 2.0 * self.delta
    }

    /// The increment-gain exponent `eps = rho / (s - 1)`.
    pub fn eps(&self) -> f64 {
        self.rho / (self.s as f64 - 1.0)
    }

    /// Default working point: `delta = 1/24`, `s = 2`, `rho = 0.2`.
    pub fn default_point(c0: f64) -> Self {
        Self {
            c0,
            delta: 1.0 / 24.0,
            s: 2,
            rho: 0.2,
        }
    }
}

/// Local existence time `T(A) = (8 C0^2 A)^{-1/delta}`, capped at 1.
///
/// Strictly decreasing in `A` and in `C0` before the cap.
pub fn existence_time(a: f64, p: &LocalTheoryParams) -> f64 {
    assert!(a > 0.0, "existence time needs A > 0");
    let base = 8.0 * p.c0 * p.c0 * a;
    base.powf(-1.0 / p.delta).min(1.0)
}

/// Empirical amplification constants of one local window.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Amplification {
    /// `sup_{t in [0, T]} ||u(t)||_{H^s} / ||u0||_{H^s}`.
    pub c_meas: f64,
    /// `||phi_T u||_{X^{1, 1/2+delta}} / ||u0||_{H^1}`.
    pub tame_meas: f64,
    /// The window actually used.
    pub window: f64,
}

/// Run the solver over `[-T, 2T]` with `T = T(||u0||_{H^1})` (or the
/// supplied override) and measure the amplification constants.
pub fn measure_amplification(
    u0: &RealField2D,
    p: &LocalTheoryParams,
    window_override: Option<f64>,
) -> Result<Amplification> {
    // reference norms from the dealias-truncated state the solver evolves
    let u0 = Solver::new(u0, SolverOptions::default()).field();
    let h1 = u0.sobolev_norm(1.0);
    if h1 == 0.0 {
        return Err(Error::Inapplicable("zero initial data"));
    }
    let big_t = window_override.unwrap_or_else(|| existence_time(h1, p));
    let hs0 = u0.sobolev_norm(p.s as f64);
    let u0 = &u0;

    // sample lattice: window [-2T, 3T] with nt samples; the field is
    // phi_T(t) u(t), which vanishes outside [-T, 2T], so only that part
    // is simulated. nt is a multiple of 5 so t = 0 lies on the lattice.
    let nt = 320usize;
    let dt_samp = 5.0 * big_t / nt as f64;
    let grid = u0.grid();
    // substeps so the solver respects the CFL bound
    let mut probe = Solver::new(u0, SolverOptions::default());
    let bound = probe.dt_bound().min(big_t / 16.0);
    let m = (dt_samp / bound).ceil().max(1.0) as usize;
    let dt = dt_samp / m as f64;

    let j_zero = 2 * nt / 5; // index of t = 0 on the window lattice
    let sample_time = |j: usize| -2.0 * big_t + j as f64 * dt_samp;

    let mut values = Array3::zeros((nt, grid.nx(), grid.ny()));
    let mut c_meas: f64 = 0.0;

    // forward sweep 0 -> 2T and backward sweep 0 -> -T
    for (dir, stop) in [(1.0, 2.0 * big_t), (-1.0, -big_t)] {
        let mut solver = Solver::new(
            u0,
            SolverOptions {
                time_step: TimeStep::Fixed(dir * dt),
                ..SolverOptions::default()
            },
        );
        let mut store = |s: &Solver, c_meas: &mut f64| {
            // records the sample if the step count lands on the lattice
            let steps = s.step_count() as usize;
            if steps % m == 0 {
                let j_off = steps / m;
                let j = if dir > 0.0 {
                    j_zero + j_off
                } else {
                    j_zero.wrapping_sub(j_off)
                };
                if j < nt {
                    let t = sample_time(j);
                    let f = s.field();
                    if (0.0..=big_t + 1e-12).contains(&t) {
                        *c_meas = c_meas.max(f.sobolev_norm(p.s as f64) / hs0);
                    }
                    let w = phi_t(t, big_t);
                    if w != 0.0 {
                        let mut slab = values.index_axis_mut(Axis(0), j);
                        slab.assign(&f.values().mapv(|v| v * w));
                    }
                }
            }
        };
        store(&solver, &mut c_meas);
        let n_steps = ((stop / (dir * dt)).round() as usize).max(1);
        for _ in 0..n_steps {
            solver.step()?;
            store(&solver, &mut c_meas);
        }
    }

    let st = SpaceTimeField::new(grid, -2.0 * big_t, 3.0 * big_t, nt, values);
    let tame = st.xsb_norm(1.0, p.b())? / h1;
    Ok(Amplification {
        c_meas,
        tame_meas: tame,
        window: big_t,
    })
}

/// Result of a polynomial-envelope fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GrowthFit {
    pub beta_best: f64,
    /// Smallest envelope constant >= 1 at `beta_best`.
    pub envelope_c: f64,
}

/// Fit `hs(t) <= C (1+t)^beta (1 + hs(0))` over a beta grid.
///
/// For each beta the minimal constant is
/// `C(beta) = max_t hs(t) / ((1+t)^beta (1+hs(0)))`. A beta is *active*
/// when the envelope is still touched in the last half of the history
/// (`C` over the last half >= 0.9 of `C` overall); `beta_best` is the
/// largest active grid value — the smallest growth rate the data itself
/// cannot rule out — or the grid minimum when no beta is active (flat
/// histories).
pub fn fit_growth(history: &[(f64, f64)], beta_grid: &[f64]) -> Result<GrowthFit> {
    if history.is_empty() || beta_grid.is_empty() {
        return Err(Error::Inapplicable("empty history or beta grid"));
    }
    for w in history.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Config("history times must be ascending".into()));
        }
    }
    let t_max = history.last().unwrap().0;
    if let Some(&(t_first, _)) = history.iter().find(|&&(t, _)| t > 0.0) {
        if t_max < 10.0 * t_first {
            return Err(Error::InsufficientSpan { t_max, t_first });
        }
    }
    let hs0 = history[0].1;
    let denom0 = 1.0 + hs0;
    let half = t_max / 2.0;

    let mut best: Option<f64> = None;
    let mut c_best = f64::NAN;
    let mut c_min_grid = f64::NAN;
    let mut beta_min = f64::INFINITY;
    for &beta in beta_grid {
        let c_of = |range_min: f64| -> f64 {
            history
                .iter()
                .filter(|&&(t, _)| t >= range_min)
                .map(|&(t, h)| h / ((1.0 + t).powf(beta) * denom0))
                .fold(0.0, f64::max)
        };
        let c_full = c_of(f64::NEG_INFINITY);
        let c_last = c_of(half);
        if beta < beta_min {
            beta_min = beta;
            c_min_grid = c_full;
        }
        let active = c_full > 0.0 && c_last >= 0.9 * c_full;
        if active && best.is_none_or(|b| beta > b) {
            best = Some(beta);
            c_best = c_full;
        }
    }
    match best {
        Some(beta_best) => Ok(GrowthFit {
            beta_best,
            envelope_c: c_best.max(1.0),
        }),
        None => Ok(GrowthFit {
            beta_best: beta_min,
            envelope_c: c_min_grid.max(1.0),
        }),
    }
}

/// Default beta grid `{0.1, 0.2, ..., 3.0}`.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=30).map(|k| k as f64 / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian;
    use crate::grid::SpectralGrid;
    use std::f64::consts::PI;

    fn params() -> LocalTheoryParams {
        LocalTheoryParams::new(1.0, 1.0 / 24.0, 2, 0.2).unwrap()
    }

    #[test]
    fn existence_time_formula() {
        // C0 = 1, delta = 1/12, A = 1/8: (8 * 1 * 1/8)^(-12) = 1 exactly.
        let p = LocalTheoryParams {
            c0: 1.0,
            delta: 1.0 / 12.0 - 1e-9,
            s: 2,
            rho: 0.2,
        };
        let t = existence_time(0.125, &p);
        assert!((t - 1.0).abs() < 1e-9);
        // homogeneity: doubling A multiplies T by 2^{-1/delta}
        let p2 = params();
        let a = 0.5;
        let ratio = existence_time(2.0 * a, &p2) / existence_time(a, &p2);
        assert!((ratio - 2f64.powf(-24.0)).abs() < 1e-12 * ratio.max(1e-300));
        // cap
        assert_eq!(existence_time(1e-9, &p2), 1.0);
        // strictly decreasing in A and C0 before the cap
        assert!(existence_time(3.0, &p2) < existence_time(2.0, &p2));
        let p3 = LocalTheoryParams { c0: 2.0, ..p2 };
        assert!(existence_time(2.0, &p3) < existence_time(2.0, &p2));
    }

    #[test]
    fn parameter_validation() {
        assert!(LocalTheoryParams::new(1.0, 0.2, 2, 0.1).is_err()); // delta too big
        assert!(LocalTheoryParams::new(1.0, 1.0 / 24.0, 1, 0.1).is_err()); // s < 2
        assert!(LocalTheoryParams::new(1.0, 1.0 / 24.0, 2, 0.3).is_err()); // rho range
    }

    #[test]
    fn amplification_zero_data_inapplicable() {
        let g = SpectralGrid::new(32, 32, 8.0 * PI, 8.0 * PI);
        let f = RealField2D::zeros(&g);
        assert!(matches!(
            measure_amplification(&f, &params(), None),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn amplification_linear_regime_is_unity() {
        // amplitude 1e-6: the flow is linear to high accuracy and H^s is
        // conserved, so c_meas = 1 within 1e-4.
        let g = SpectralGrid::new(32, 32, 8.0 * PI, 8.0 * PI);
        let f = gaussian(&g, 1e-6, 2.0);
        let a = measure_amplification(&f, &params(), Some(0.25)).unwrap();
        assert!(
            (a.c_meas - 1.0).abs() < 1e-4,
            "linear-regime amplification {}",
            a.c_meas
        );
        assert!(a.tame_meas.is_finite() && a.tame_meas > 0.0);
    }

    #[test]
    fn amplification_moderate_decreases_with_t() {
        let g = SpectralGrid::new(32, 32, 8.0 * PI, 8.0 * PI);
        let f = gaussian(&g, 1.0, 2.0);
        let a_long = measure_amplification(&f, &params(), Some(0.5)).unwrap();
        let a_short = measure_amplification(&f, &params(), Some(0.125)).unwrap();
        assert!(a_long.c_meas.is_finite() && a_short.c_meas.is_finite());
        assert!(a_short.c_meas <= a_long.c_meas * (1.0 + 1e-6));
    }

    #[test]
    fn fit_constant_history() {
        let history: Vec<(f64, f64)> = (0..200).map(|k| (k as f64 * 0.5, 4.2)).collect();
        let fit = fit_growth(&history, &default_beta_grid()).unwrap();
        assert_eq!(fit.beta_best, 0.1);
        assert_eq!(fit.envelope_c, 1.0);
    }

    #[test]
    fn fit_synthetic_power_law() {
        // hs(t) = (1+t)^0.7: beta_best must land in [0.7, 0.8).
        let history: Vec<(f64, f64)> =
            (0..500).map(|k| (k as f64 * 0.2, (1.0 + k as f64 * 0.2).powf(0.7))).collect();
        let fit = fit_growth(&history, &default_beta_grid()).unwrap();
        assert!(
            (0.7..0.8).contains(&fit.beta_best),
            "beta_best = {}",
            fit.beta_best
        );
    }

    #[test]
    fn fit_insufficient_span() {
        let history = vec![(1.0, 1.0), (2.0, 1.1), (5.0, 1.2)];
        assert!(matches!(
            fit_growth(&history, &default_beta_grid()),
            Err(Error::InsufficientSpan { .. })
        ));
    }
}
