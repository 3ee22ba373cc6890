//! Discrete space-time Fourier analysis: the smooth time cutoff, the
//! `X^{s,b}` norms weighting frequency by `<|(xi,mu)|>^s` and modulation
//! by `<tau - omega(xi,mu)>^b`, and empirical probes of the linear
//! estimates and embeddings.
//!
//! Norm sums run over every lattice bin; only multiplier *applications*
//! zero the Nyquist lines. Fields fed to a norm must be compactly
//! supported in time inside their window so the discrete tau-transform is
//! faithful; this is enforced by a boundary-leakage check rather than a
//! margin rule.

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::RealField2D;
use crate::grid::{aniso_bracket, SpectralGrid};
use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;
use std::sync::{Arc, OnceLock};

/// Concrete value used for every `b+` exponent in the estimates.
pub const B_PLUS_EPS: f64 = 0.01;

/// Relative boundary amplitude above which a window is rejected.
pub const LEAKAGE_TOL: f64 = 1e-10;

/// Smooth bump equal to 1 on `[0, 1]` and 0 outside `[-1, 2]`.
pub fn phi(t: f64) -> f64 {
    if t <= -1.0 || t >= 2.0 {
        0.0
    } else if t < 0.0 {
        smoothstep(t + 1.0)
    } else if t <= 1.0 {
        1.0
    } else {
        smoothstep(2.0 - t)
    }
}

/// `phi_T(t) = phi(t / T)`: equal to 1 on `[0, T]`, supported in `[-T, 2T]`.
pub fn phi_t(t: f64, big_t: f64) -> f64 {
    phi(t / big_t)
}

fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let g = (-1.0 / x).exp();
        let h = (-1.0 / (1.0 - x)).exp();
        g / (g + h)
    }
}

/// A real field `u(t, x, y)` on a uniformly sampled time window, with a
/// cached 3D `(tau, xi, mu)` spectrum.
///
/// Samples live at `t_j = t_min + j * dt`, `j = 0..nt`, with
/// `dt = (t_max - t_min) / nt` (periodic convention: `t_max` itself is
/// identified with `t_min`).
pub struct SpaceTimeField {
    grid: Arc<SpectralGrid>,
    t_min: f64,
    t_max: f64,
    nt: usize,
    values: Array3<f64>,
    spectrum: OnceLock<Array3<Complex64>>,
}

impl SpaceTimeField {
    pub fn new(grid: &Arc<SpectralGrid>, t_min: f64, t_max: f64, nt: usize, values: Array3<f64>) -> Self {
        // Odd sample counts are fine for slice-wise use (trajectories);
        // the tau-spectral operations assert evenness in `coeffs`.
        assert!(nt >= 4, "nt must be >= 4");
        assert!(t_max > t_min);
        assert_eq!(values.dim(), (nt, grid.nx(), grid.ny()));
        Self {
            grid: Arc::clone(grid),
            t_min,
            t_max,
            nt,
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_fn(
        grid: &Arc<SpectralGrid>,
        t_min: f64,
        t_max: f64,
        nt: usize,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Self {
        let dt = (t_max - t_min) / nt as f64;
        let (dx, dy) = (grid.dx(), grid.dy());
        let values = Array3::from_shape_fn((nt, grid.nx(), grid.ny()), |(j, ix, iy)| {
            f(t_min + j as f64 * dt, ix as f64 * dx, iy as f64 * dy)
        });
        Self::new(grid, t_min, t_max, nt, values)
    }

    /// Assemble from equally spaced slices starting at `t_min`.
    pub fn from_slices(t_min: f64, dt: f64, slices: &[RealField2D]) -> Self {
        assert!(slices.len() >= 4, "need at least 4 slices");
        let grid = Arc::clone(slices[0].grid());
        let nt = slices.len();
        let mut values = Array3::zeros((nt, grid.nx(), grid.ny()));
        for (j, s) in slices.iter().enumerate() {
            values.index_axis_mut(Axis(0), j).assign(s.values());
        }
        Self::new(&grid, t_min, t_min + nt as f64 * dt, nt, values)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn dt(&self) -> f64 {
        self.span() / self.nt as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt()
    }

    /// Modulation lattice frequency of time-bin `j`.
    pub fn tau(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * crate::fft::signed_index(j, self.nt) as f64 / self.span()
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn slice(&self, j: usize) -> RealField2D {
        RealField2D::from_values(&self.grid, self.values.index_axis(Axis(0), j).to_owned())
    }

    /// 3D series coefficients over `(tau, xi, mu)`, cached.
    pub fn coeffs(&self) -> &Array3<Complex64> {
        assert!(self.nt % 2 == 0, "tau-spectral operations need even nt");
        self.spectrum.get_or_init(|| {
            let mut work = self.values.mapv(|v| Complex64::new(v, 0.0));
            Fft3::new(self.nt, self.grid.nx(), self.grid.ny()).forward(&mut work);
            work
        })
    }

    /// Rebuild physical values from a coefficient block.
    pub fn from_coeffs(
        grid: &Arc<SpectralGrid>,
        t_min: f64,
        t_max: f64,
        coeffs: Array3<Complex64>,
    ) -> Self {
        let nt = coeffs.dim().0;
        let mut work = coeffs.clone();
        Fft3::new(nt, grid.nx(), grid.ny()).inverse(&mut work);
        let max_amp = work.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let max_imag = work.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(
            max_imag <= 1e-11 * max_amp.max(f64::MIN_POSITIVE),
            "imaginary leakage {max_imag:.3e} of {max_amp:.3e}"
        );
        let f = Self::new(grid, t_min, t_max, nt, work.mapv(|c| c.re));
        let _ = f.spectrum.set(coeffs);
        f
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Space-time L2 norm by quadrature.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_weight() * self.dt();
        (self.values.iter().map(|v| v * v).sum::<f64>() * w).sqrt()
    }

    /// Space-time L4 norm by quadrature.
    pub fn l4_norm(&self) -> f64 {
        let w = self.grid.cell_weight() * self.dt();
        (self.values.iter().map(|v| v.powi(4)).sum::<f64>() * w).powf(0.25)
    }

    fn check_support(&self) -> Result<()> {
        let max = self.max_abs();
        let boundary = self
            .values
            .index_axis(Axis(0), 0)
            .iter()
            .chain(self.values.index_axis(Axis(0), self.nt - 1).iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if boundary > LEAKAGE_TOL * max {
            return Err(Error::SupportLeakage {
                boundary,
                max_abs: max,
                tolerance: LEAKAGE_TOL,
            });
        }
        Ok(())
    }

    /// `X^{s,b}` norm: discrete triple sum of
    /// `<|(xi,mu)|>^{2s} <tau - omega>^{2b} |c|^2` times the box volume.
    pub fn xsb_norm(&self, s: f64, b: f64) -> Result<f64> {
        self.check_support()?;
        let grid = &self.grid;
        let volume = self.span() * grid.area();
        let ny = grid.ny();
        let mut sum = 0.0;
        for ((jt, jx, jy), c) in self.coeffs().indexed_iter() {
            let _ = ny;
            let w_space = aniso_bracket(grid.xi(jx), grid.mu(jy)).powf(2.0 * s);
            let sigma = self.tau(jt) - grid.omega_at(jx, jy);
            let w_mod = (1.0 + sigma * sigma).powf(b);
            sum += w_space * w_mod * c.norm_sqr();
        }
        Ok((sum * volume).sqrt())
    }

    /// Largest spatial Sobolev norm over the sampled times.
    pub fn sup_sobolev(&self, s: f64) -> f64 {
        (0..self.nt)
            .map(|j| self.slice(j).sobolev_norm(s))
            .fold(0.0, f64::max)
    }

    /// Multiply every time slice by `w(t_j)`.
    pub fn time_weighted(&self, w: impl Fn(f64) -> f64) -> SpaceTimeField {
        let mut values = self.values.clone();
        for (j, mut slab) in values.axis_iter_mut(Axis(0)).enumerate() {
            let f = w(self.time(j));
            slab.mapv_inplace(|v| v * f);
        }
        Self::new(&self.grid, self.t_min, self.t_max, self.nt, values)
    }
}

/// `u(t) = phi_T(t) W(t) f0` sampled on a window.
pub fn truncated_flow(
    f0: &RealField2D,
    big_t: f64,
    t_min: f64,
    t_max: f64,
    nt: usize,
) -> SpaceTimeField {
    let grid = Arc::clone(f0.grid());
    let dt = (t_max - t_min) / nt as f64;
    let base = f0.coeffs().clone();
    let mut values = Array3::zeros((nt, grid.nx(), grid.ny()));
    for j in 0..nt {
        let t = t_min + j as f64 * dt;
        let w = phi_t(t, big_t);
        if w == 0.0 {
            continue;
        }
        let slice = crate::dynamics::linear_propagate_coeffs(&grid, &base, t);
        let f = RealField2D::from_coeffs(&grid, slice);
        values
            .index_axis_mut(Axis(0), j)
            .assign(&f.values().mapv(|v| v * w));
    }
    SpaceTimeField::new(&grid, t_min, t_max, nt, values)
}

/// 1D Sobolev-in-time norm of `phi_T`, the reference value of the
/// separation-of-variables identity. Computed on a `refine`-times finer
/// lattice over `[-2, 3]`.
pub fn phi_t_sobolev_norm(big_t: f64, b: f64, refine: usize) -> f64 {
    let nt = 256 * refine.max(1);
    let (t_min, t_max) = (-2.0, 3.0);
    let span = t_max - t_min;
    let dt = span / nt as f64;
    let mut data: Vec<Complex64> = (0..nt)
        .map(|j| Complex64::new(phi_t(t_min + j as f64 * dt, big_t), 0.0))
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(nt).process(&mut data);
    // series coefficients
    let scale = 1.0 / nt as f64;
    let sum: f64 = data
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let tau = 2.0 * std::f64::consts::PI * crate::fft::signed_index(j, nt) as f64 / span;
            (1.0 + tau * tau).powf(b) * (c * scale).norm_sqr()
        })
        .sum();
    (sum * span).sqrt()
}

/// Ratio probe of `||phi_T W(t) f||_{X^{s,b}} <= C T^{1/2-b} ||f||_{H^s}`.
pub fn check_linear_estimate(f0: &RealField2D, s: f64, b: f64, big_t: f64) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::ParameterRange("linear estimate needs b >= 0".into()));
    }
    if !(0.0 < big_t && big_t <= 1.0) {
        return Err(Error::ParameterRange("T must lie in (0, 1]".into()));
    }
    let denom = big_t.powf(0.5 - b) * f0.sobolev_norm(s);
    if denom == 0.0 {
        return Err(Error::Inapplicable("zero initial data"));
    }
    let field = truncated_flow(f0, big_t, DEFAULT_WINDOW.0, DEFAULT_WINDOW.1, DEFAULT_NT);
    Ok(field.xsb_norm(s, b)? / denom)
}

/// Default space-time window `[-2, 3]` with 256 samples; `supp phi_1`
/// sits inside with one unit of padding on each side.
pub const DEFAULT_WINDOW: (f64, f64) = (-2.0, 3.0);
pub const DEFAULT_NT: usize = 256;

/// `phi_T(t) * Int_0^t W(t - t') g(t') dt'` on a 0-aligned window, by
/// cumulative Simpson quadrature in the interaction picture.
pub fn duhamel_apply(g: &SpaceTimeField, big_t: f64) -> SpaceTimeField {
    let grid = g.grid();
    let nt = g.nt();
    let dt = g.dt();
    let anchor = ((0.0 - g.t_min()) / dt).round() as usize;
    assert!(
        ((0.0 - g.t_min()) / dt - anchor as f64).abs() < 1e-9 && anchor < nt,
        "window must contain t = 0 on the sample lattice"
    );
    // h(t) = exp(-i t omega) g_hat(t) per spatial bin
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut slabs: Vec<Array2<Complex64>> = (0..nt)
        .map(|j| {
            let mut c = g.slice(j).coeffs().clone();
            let t = g.time(j);
            for ((jx, jy), v) in c.indexed_iter_mut() {
                let w = grid.omega_at(jx, jy);
                *v *= Complex64::from_polar(1.0, -t * w);
            }
            c
        })
        .collect();
    let integral = cumulative_simpson(&slabs, anchor, dt, nx, ny);
    for (j, slab) in slabs.iter_mut().enumerate() {
        let t = g.time(j);
        let cutoff = phi_t(t, big_t);
        for ((jx, jy), v) in slab.indexed_iter_mut() {
            let w = grid.omega_at(jx, jy);
            *v = integral[j][[jx, jy]] * Complex64::from_polar(cutoff, t * w);
        }
    }
    let slices: Vec<RealField2D> = slabs
        .into_iter()
        .map(|c| RealField2D::from_coeffs(grid, c))
        .collect();
    SpaceTimeField::from_slices(g.t_min(), dt, &slices)
}

/// Cumulative integral `I_j = Int_{t_anchor}^{t_j} f`, fourth order, for
/// slab-valued integrands.
fn cumulative_simpson(
    slabs: &[Array2<Complex64>],
    anchor: usize,
    dt: f64,
    nx: usize,
    ny: usize,
) -> Vec<Array2<Complex64>> {
    let nt = slabs.len();
    let zero = Array2::<Complex64>::zeros((nx, ny));
    let mut out: Vec<Array2<Complex64>> = vec![zero; nt];
    // forward sweep from the anchor
    for j in (anchor + 1)..nt {
        let k = j - anchor;
        out[j] = if k == 1 {
            if j + 1 < nt {
                // parabola through (j-1, j, j+1), integrated on the first subinterval
                (&slabs[j - 1] * Complex64::from(5.0 * dt / 12.0))
                    + (&slabs[j] * Complex64::from(8.0 * dt / 12.0))
                    + (&slabs[j + 1] * Complex64::from(-dt / 12.0))
            } else {
                (&slabs[j - 1] + &slabs[j]) * Complex64::from(dt / 2.0)
            }
        } else if k % 2 == 0 {
            &out[j - 2]
                + &((&slabs[j - 2] + &(&slabs[j - 1] * Complex64::from(4.0)) + &slabs[j])
                    * Complex64::from(dt / 3.0))
        } else {
            &out[j - 1]
                + &((&slabs[j - 2] * Complex64::from(-1.0 / 12.0)
                    + &(&slabs[j - 1] * Complex64::from(8.0 / 12.0))
                    + &(&slabs[j] * Complex64::from(5.0 / 12.0)))
                    * Complex64::from(dt))
        };
    }
    // backward sweep: I_j = -Int_{t_j}^{anchor}
    for j in (0..anchor).rev() {
        let k = anchor - j;
        out[j] = if k == 1 {
            if j >= 1 {
                ((&slabs[j + 1] * Complex64::from(5.0 * dt / 12.0))
                    + (&slabs[j] * Complex64::from(8.0 * dt / 12.0))
                    + (&slabs[j - 1] * Complex64::from(-dt / 12.0)))
                    * Complex64::from(-1.0)
            } else {
                (&slabs[j + 1] + &slabs[j]) * Complex64::from(-dt / 2.0)
            }
        } else if k % 2 == 0 {
            &out[j + 2]
                - &((&slabs[j + 2] + &(&slabs[j + 1] * Complex64::from(4.0)) + &slabs[j])
                    * Complex64::from(dt / 3.0))
        } else {
            &out[j + 1]
                - &((&slabs[j + 2] * Complex64::from(-1.0 / 12.0)
                    + &(&slabs[j + 1] * Complex64::from(8.0 / 12.0))
                    + &(&slabs[j] * Complex64::from(5.0 / 12.0)))
                    * Complex64::from(dt))
        };
    }
    out
}

/// Ratio probe of the Duhamel smoothing estimate
/// `||phi_T Int_0^t W(t-t') g|| _{X^{s,b}} <= C T^{1-b+b'} ||g||_{X^{s,b'}}`.
pub fn check_duhamel_estimate(g: &SpaceTimeField, s: f64, b: f64, b_prime: f64, big_t: f64) -> Result<f64> {
    if !(-0.5 < b_prime && b_prime < 0.0 && 0.0 < b && b <= 1.0 + b_prime) {
        return Err(Error::ParameterRange(format!(
            "need -1/2 < b' < 0 < b <= 1 + b', got b = {b}, b' = {b_prime}"
        )));
    }
    let rhs = big_t.powf(1.0 - b + b_prime) * g.xsb_norm(s, b_prime)?;
    if rhs == 0.0 {
        return Err(Error::Inapplicable("zero Duhamel input"));
    }
    let lhs = duhamel_apply(g, big_t).xsb_norm(s, b)?;
    Ok(lhs / rhs)
}

/// Ratio probe of the time-shrinking embedding
/// `||phi_T u||_{X^{s,b'}} <= C T^{b-b'} ||phi_T u||_{X^{s,b}}` for
/// `0 < b - b' < 1/2`.
pub fn check_time_shrink(u: &SpaceTimeField, s: f64, b: f64, b_prime: f64, big_t: f64) -> Result<f64> {
    let gap = b - b_prime;
    if !(gap > 0.0 && gap < 0.5) {
        return Err(Error::ParameterRange(format!(
            "need 0 < b - b' < 1/2, got {gap}"
        )));
    }
    let truncated = u.time_weighted(|t| phi_t(t, big_t));
    let rhs = big_t.powf(gap) * truncated.xsb_norm(s, b)?;
    if rhs == 0.0 {
        return Err(Error::Inapplicable("zero field"));
    }
    Ok(truncated.xsb_norm(s, b_prime)? / rhs)
}

/// Embedding probes.
#[derive(Debug, Clone, Copy)]
pub enum EmbeddingMode {
    /// `||u||_{L^4} <= C ||u||_{X^{0, 5/12+}}`.
    L4,
    /// `sup_t ||u(t)||_{H^s} <= C ||u||_{X^{s, 1/2+}}`.
    SupHs { s: f64 },
}

pub fn check_embedding(u: &SpaceTimeField, mode: EmbeddingMode) -> Result<f64> {
    let (lhs, rhs) = match mode {
        EmbeddingMode::L4 => (u.l4_norm(), u.xsb_norm(0.0, 5.0 / 12.0 + B_PLUS_EPS)?),
        EmbeddingMode::SupHs { s } => (u.sup_sobolev(s), u.xsb_norm(s, 0.5 + B_PLUS_EPS)?),
    };
    if rhs == 0.0 {
        return Err(Error::Inapplicable("zero field"));
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid32() -> Arc<SpectralGrid> {
        SpectralGrid::new(32, 32, 8.0 * PI, 8.0 * PI)
    }

    #[test]
    fn phi_plateau_and_support() {
        assert_eq!(phi(-1.0), 0.0);
        assert_eq!(phi(2.0), 0.0);
        assert_eq!(phi(0.0), 1.0);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(0.5), 1.0);
        assert!(phi(-0.5) > 0.0 && phi(-0.5) < 1.0);
        assert!(phi(1.5) > 0.0 && phi(1.5) < 1.0);
        for i in -30..60 {
            let t = i as f64 * 0.05;
            assert!((0.0..=1.0).contains(&phi(t)));
        }
    }

    #[test]
    fn xsb_zero_zero_is_l2() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 2.0);
        let u = truncated_flow(&f0, 0.5, -2.0, 3.0, 64);
        assert_relative_eq!(u.xsb_norm(0.0, 0.0).unwrap(), u.l2_norm(), max_relative = 1e-10);
    }

    #[test]
    fn xsb_monotone_in_s_and_b() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 2.0);
        let u = truncated_flow(&f0, 0.5, -2.0, 3.0, 64);
        let base = u.xsb_norm(1.0, 0.25).unwrap();
        assert!(u.xsb_norm(1.0, 0.5).unwrap() >= base);
        assert!(u.xsb_norm(2.0, 0.25).unwrap() >= base);
        assert!(u.xsb_norm(1.0, 0.0).unwrap() <= base);
        assert!(u.xsb_norm(1.0, -0.25).unwrap() <= base);
    }

    #[test]
    fn support_leakage_detected() {
        let g = grid32();
        // constant in time: wraps around the window, boundary = interior
        let u = SpaceTimeField::from_fn(&g, -1.0, 1.0, 16, |_, x, _| (x / 4.0).sin());
        assert!(matches!(
            u.xsb_norm(0.0, 0.5),
            Err(Error::SupportLeakage { .. })
        ));
    }

    #[test]
    fn separation_identity_exact_equality() {
        // || phi_T W f ||_{X^{s,b}} = || phi_T ||_{H^b_t} || f ||_{H^s}
        // within discretization.
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 3.0);
        for &big_t in &[1.0, 0.5, 0.25] {
            let u = truncated_flow(&f0, big_t, DEFAULT_WINDOW.0, DEFAULT_WINDOW.1, DEFAULT_NT);
            for &s in &[0.0, 1.0, 2.0] {
                for &b in &[0.0, 5.0 / 12.0, 0.5, 0.6] {
                    let lhs = u.xsb_norm(s, b).unwrap().powi(2);
                    let rhs = (phi_t_sobolev_norm(big_t, b, 4) * f0.sobolev_norm(s)).powi(2);
                    let ratio = lhs / rhs;
                    assert!(
                        (0.98..=1.02).contains(&ratio),
                        "s={s} b={b} T={big_t}: ratio {ratio}"
                    );
                }
            }
        }
    }

    #[test]
    fn linear_estimate_ratio_t1_matches_phi_norm() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 3.0);
        let (s, b) = (1.0, 0.5);
        let ratio = check_linear_estimate(&f0, s, b, 1.0).unwrap();
        let expect = phi_t_sobolev_norm(1.0, b, 4);
        assert!(
            (ratio / expect - 1.0).abs() < 0.02,
            "ratio {ratio} vs phi norm {expect}"
        );
    }

    #[test]
    fn linear_estimate_half_b_t_sweep() {
        // At b = 1/2 the estimate's T-exponent vanishes, so the sweep must
        // be bounded and settle as T shrinks (the inhomogeneous part of
        // the bracket still moves the small-T ratios toward a limit).
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 3.0);
        let ratios: Vec<f64> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&t| check_linear_estimate(&f0, 1.0, 0.5, t).unwrap())
            .collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi < 2.0, "b=1/2 sweep not bounded: {ratios:?}");
        // successive differences shrink
        assert!((ratios[2] - ratios[3]).abs() < (ratios[0] - ratios[1]).abs());
        // the settled tail is T-independent within 5%
        assert!(ratios[2] / ratios[3] < 1.05 && ratios[3] / ratios[2] < 1.05);
    }

    #[test]
    fn linear_estimate_zero_data_inapplicable() {
        let g = grid32();
        let f0 = RealField2D::zeros(&g);
        assert!(matches!(
            check_linear_estimate(&f0, 1.0, 0.5, 0.5),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn time_shrink_parameter_range() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 2.0);
        let u = truncated_flow(&f0, 0.25, -2.0, 3.0, 64);
        assert!(matches!(
            check_time_shrink(&u, 0.0, 0.5, 0.5, 0.25),
            Err(Error::ParameterRange(_))
        ));
        let r = check_time_shrink(&u, 0.0, 0.5, 0.25, 0.25).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn embedding_ratios_scale_invariant() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 2.0);
        let u = truncated_flow(&f0, 0.5, -2.0, 3.0, 64);
        let lam = 37.5;
        let scaled = u.time_weighted(|_| lam);
        for mode in [EmbeddingMode::L4, EmbeddingMode::SupHs { s: 1.0 }] {
            let a = check_embedding(&u, mode).unwrap();
            let b = check_embedding(&scaled, mode).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn duhamel_estimate_zero_inapplicable_and_finite() {
        let g = grid32();
        let zero = SpaceTimeField::from_fn(&g, -2.0, 2.0, 32, |_, _, _| 0.0);
        let (b, bp) = (0.5 + 1.0 / 24.0, -0.5 + 2.0 / 24.0);
        assert!(matches!(
            check_duhamel_estimate(&zero, 0.0, b, bp, 0.5),
            Err(Error::Inapplicable(_))
        ));
        // smooth compactly supported g
        let f0 = gaussian(&g, 1.0, 2.0);
        let mut g_field = truncated_flow(&f0, 0.5, -2.0, 2.0, 64);
        g_field = g_field.time_weighted(|t| (1.3 * t).cos());
        let r = check_duhamel_estimate(&g_field, 0.0, b, bp, 0.5).unwrap();
        assert!(r.is_finite() && r > 0.0, "ratio {r}");
    }

    #[test]
    fn duhamel_rejects_bad_parameters() {
        let g = grid32();
        let f0 = gaussian(&g, 1.0, 2.0);
        let u = truncated_flow(&f0, 0.5, -2.0, 2.0, 32);
        assert!(matches!(
            check_duhamel_estimate(&u, 0.0, 0.3, -0.8, 0.5),
            Err(Error::ParameterRange(_))
        ));
    }
}
