//! Time integration: exact linear propagation in Fourier space plus a
//! dealiased quadratic nonlinearity, combined by an integrating-factor RK4
//! (the linear phase is removed exactly, so disabling the nonlinearity
//! makes the stepper coincide with the closed-form flow).

use crate::error::{Error, Result};
use crate::field::RealField2D;
use crate::grid::SpectralGrid;
use crate::xsb::SpaceTimeField;
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

/// Exact solution at time `t` of the linear part `u_t + d/dx Laplace(u) = 0`:
/// every coefficient is multiplied by `exp(i t omega(xi, mu))`.
pub fn linear_propagate(f: &RealField2D, t: f64) -> RealField2D {
    let grid = f.grid();
    let coeffs = linear_propagate_coeffs(grid, f.coeffs(), t);
    RealField2D::from_coeffs(grid, coeffs)
}

pub(crate) fn linear_propagate_coeffs(
    grid: &Arc<SpectralGrid>,
    coeffs: &Array2<Complex64>,
    t: f64,
) -> Array2<Complex64> {
    let mut out = coeffs.clone();
    for ((jx, jy), c) in out.indexed_iter_mut() {
        if grid.is_nyquist(jx, jy) {
            *c = Complex64::default();
        } else {
            *c *= Complex64::from_polar(1.0, t * grid.omega_at(jx, jy));
        }
    }
    out
}

/// `-d/dx (u^2)` by physical-space squaring, 2/3-rule dealiasing, and
/// spectral differentiation. The output has exactly zero mean.
pub fn nonlinear_term(u: &RealField2D) -> RealField2D {
    let grid = u.grid();
    let mut work = u.values().mapv(|v| Complex64::new(v * v, 0.0));
    grid.fft().forward(&mut work);
    apply_nonlinear_symbol(grid, &mut work);
    RealField2D::from_coeffs(grid, work)
}

/// In place: coefficients of `q` -> coefficients of `-d/dx P(q)` where `P`
/// is the dealiasing projection.
fn apply_nonlinear_symbol(grid: &Arc<SpectralGrid>, coeffs: &mut Array2<Complex64>) {
    for ((jx, jy), c) in coeffs.indexed_iter_mut() {
        if grid.in_dealias_band(jx, jy) {
            *c *= Complex64::new(0.0, -grid.xi(jx));
        } else {
            *c = Complex64::default();
        }
    }
}

/// Time step selection.
#[derive(Debug, Clone, Copy)]
pub enum TimeStep {
    /// Fixed step; clamped down if the advective CFL bound is violated.
    Fixed(f64),
    /// Adaptive step `dt = cfl * min(dx, dy) / max(1, max|u|)`.
    Cfl(f64),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub time_step: TimeStep,
    /// CFL number used to validate fixed steps.
    pub cfl: f64,
    pub nonlinear: bool,
    /// Blow-up ceiling as a multiple of the initial amplitude.
    pub ceiling_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            time_step: TimeStep::Cfl(0.5),
            cfl: 0.5,
            nonlinear: true,
            ceiling_factor: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn fixed(dt: f64) -> Self {
        Self {
            time_step: TimeStep::Fixed(dt),
            ..Default::default()
        }
    }

    pub fn linear_only(dt: f64) -> Self {
        Self {
            time_step: TimeStep::Fixed(dt),
            nonlinear: false,
            ..Default::default()
        }
    }
}

/// Phase tables `exp(i dt omega / 2)` and `exp(i dt omega)` for one step size.
struct PropagatorCache {
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl PropagatorCache {
    fn new(grid: &SpectralGrid, dt: f64) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let mut half = vec![Complex64::default(); nx * ny];
        let mut full = vec![Complex64::default(); nx * ny];
        for jx in 0..nx {
            for jy in 0..ny {
                let idx = jx * ny + jy;
                if !grid.is_nyquist(jx, jy) {
                    let w = grid.omega_at(jx, jy);
                    half[idx] = Complex64::from_polar(1.0, 0.5 * dt * w);
                    full[idx] = Complex64::from_polar(1.0, dt * w);
                }
            }
        }
        Self { dt, half, full }
    }
}

/// Pseudo-spectral solver owning its state; diagnostics receive snapshots.
pub struct Solver {
    grid: Arc<SpectralGrid>,
    coeffs: Array2<Complex64>,
    t: f64,
    step_count: u64,
    opts: SolverOptions,
    ceiling: f64,
    cache: Option<PropagatorCache>,
    /// scratch buffers for the four stages
    na: Array2<Complex64>,
    nb: Array2<Complex64>,
    nc: Array2<Complex64>,
    stage: Array2<Complex64>,
    last_max_abs: f64,
    clamped_steps: u64,
}

impl Solver {
    pub fn new(u0: &RealField2D, opts: SolverOptions) -> Self {
        let grid = Arc::clone(u0.grid());
        // keep the state inside the dealias band from the start
        let mut coeffs = u0.coeffs().clone();
        for ((jx, jy), c) in coeffs.indexed_iter_mut() {
            if !grid.in_dealias_band(jx, jy) {
                *c = Complex64::default();
            }
        }
        let shape = (grid.nx(), grid.ny());
        let max0 = u0.max_abs();
        Self {
            ceiling: opts.ceiling_factor * max0.max(1e-300),
            grid,
            coeffs,
            t: 0.0,
            step_count: 0,
            opts,
            cache: None,
            na: Array2::zeros(shape),
            nb: Array2::zeros(shape),
            nc: Array2::zeros(shape),
            stage: Array2::zeros(shape),
            last_max_abs: max0,
            clamped_steps: 0,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn last_max_abs(&self) -> f64 {
        self.last_max_abs
    }

    pub fn clamped_steps(&self) -> u64 {
        self.clamped_steps
    }

    /// Snapshot of the current state as a real field.
    pub fn field(&self) -> RealField2D {
        RealField2D::from_coeffs(&self.grid, self.coeffs.clone())
    }

    /// Nonlinear stage: `out = coeffs of -d/dx P((ifft in)^2)`.
    /// Also records `max |u|` of the input state when `track_max` is set.
    fn eval_nonlinear(&mut self, input: Array2<Complex64>, track_max: bool) -> Array2<Complex64> {
        let mut phys = input;
        self.grid.fft().inverse(&mut phys);
        if track_max {
            self.last_max_abs = phys.iter().fold(0.0, |m, c| m.max(c.re.abs()));
        }
        phys.mapv_inplace(|c| Complex64::new(c.re * c.re, 0.0));
        self.grid.fft().forward(&mut phys);
        apply_nonlinear_symbol(&self.grid, &mut phys);
        phys
    }

    fn refresh_max_abs(&mut self) {
        let mut phys = self.coeffs.clone();
        self.grid.fft().inverse(&mut phys);
        self.last_max_abs = phys.iter().fold(0.0, |m, c| m.max(c.re.abs()));
    }

    /// The advective CFL bound for the current state.
    pub fn dt_bound(&self) -> f64 {
        let h = self.grid.dx().min(self.grid.dy());
        self.opts.cfl * h / self.last_max_abs.max(1.0)
    }

    /// Advance one step. Returns the dt actually taken.
    pub fn step(&mut self) -> Result<f64> {
        if !self.opts.nonlinear {
            // pure linear flow: exact propagation
            let dt = match self.opts.time_step {
                TimeStep::Fixed(dt) => dt,
                TimeStep::Cfl(c) => c * self.grid.dx().min(self.grid.dy()),
            };
            self.ensure_cache(dt);
            let cache = self.cache.as_ref().unwrap();
            let ny = self.grid.ny();
            for ((jx, jy), c) in self.coeffs.indexed_iter_mut() {
                *c *= cache.full[jx * ny + jy];
            }
            self.t += dt;
            self.step_count += 1;
            return Ok(dt);
        }

        if self.step_count == 0 {
            self.refresh_max_abs();
        }
        let bound = self.dt_bound();
        let dt = match self.opts.time_step {
            TimeStep::Fixed(dt) => {
                if dt.abs() > bound {
                    self.clamped_steps += 1;
                    bound * dt.signum()
                } else {
                    dt
                }
            }
            TimeStep::Cfl(_) => bound,
        };
        self.ensure_cache(dt);

        // Integrating-factor RK4 with E = exp(i dt omega / 2):
        //   Na = N(c)
        //   Nb = N(E (c + dt/2 Na))
        //   Nc = N(E c + dt/2 Nb)
        //   Nd = N(E^2 c + dt E Nc)
        //   c' = E^2 c + dt/6 (E^2 Na + 2 E (Nb + Nc) + Nd)
        let ny = self.grid.ny();
        self.na = self.eval_nonlinear(self.coeffs.clone(), true);
        if self.last_max_abs > self.ceiling {
            return Err(Error::BlowUpSuspected {
                t: self.t,
                max_abs: self.last_max_abs,
                ceiling: self.ceiling,
            });
        }

        let cache = self.cache.as_ref().unwrap();
        let half_dt = 0.5 * dt;
        for ((jx, jy), v) in self.stage.indexed_iter_mut() {
            let e = cache.half[jx * ny + jy];
            *v = e * (self.coeffs[[jx, jy]] + half_dt * self.na[[jx, jy]]);
        }
        self.nb = self.eval_nonlinear(self.stage.clone(), false);

        let cache = self.cache.as_ref().unwrap();
        for ((jx, jy), v) in self.stage.indexed_iter_mut() {
            let e = cache.half[jx * ny + jy];
            *v = e * self.coeffs[[jx, jy]] + half_dt * self.nb[[jx, jy]];
        }
        self.nc = self.eval_nonlinear(self.stage.clone(), false);

        let cache = self.cache.as_ref().unwrap();
        for ((jx, jy), v) in self.stage.indexed_iter_mut() {
            let idx = jx * ny + jy;
            *v = cache.full[idx] * self.coeffs[[jx, jy]] + dt * cache.half[idx] * self.nc[[jx, jy]];
        }
        let nd = self.eval_nonlinear(self.stage.clone(), false);

        let cache = self.cache.as_ref().unwrap();
        let sixth = dt / 6.0;
        for ((jx, jy), c) in self.coeffs.indexed_iter_mut() {
            let idx = jx * ny + jy;
            let e = cache.half[idx];
            let e2 = cache.full[idx];
            *c = e2 * (*c + sixth * self.na[[jx, jy]])
                + sixth * (2.0 * e * (self.nb[[jx, jy]] + self.nc[[jx, jy]]) + nd[[jx, jy]]);
        }
        self.t += dt;
        self.step_count += 1;
        Ok(dt)
    }

    fn ensure_cache(&mut self, dt: f64) {
        let stale = match &self.cache {
            Some(c) => c.dt != dt,
            None => true,
        };
        if stale {
            self.cache = Some(PropagatorCache::new(&self.grid, dt));
        }
    }

    /// Run until `t_end` (exclusive of overshoot: the last step is shortened
    /// to land on `t_end` exactly). Calls `on_step(solver)` after every step.
    pub fn run_until(
        &mut self,
        t_end: f64,
        mut on_step: impl FnMut(&Solver) -> Result<()>,
    ) -> Result<()> {
        let forward = t_end >= self.t;
        while (forward && self.t < t_end - 1e-12) || (!forward && self.t > t_end + 1e-12) {
            let remaining = t_end - self.t;
            if let TimeStep::Fixed(dt) = self.opts.time_step {
                if remaining.abs() < dt.abs() * (1.0 - 1e-9) {
                    self.opts.time_step = TimeStep::Fixed(remaining);
                }
            } else if let TimeStep::Cfl(_) = self.opts.time_step {
                if self.dt_bound() > remaining.abs() {
                    self.opts.time_step = TimeStep::Fixed(remaining);
                }
            }
            self.step()?;
            on_step(self)?;
        }
        Ok(())
    }
}

/// A uniformly sampled solver trajectory.
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub slices: Vec<RealField2D>,
}

impl Trajectory {
    pub fn t_last(&self) -> f64 {
        self.t0 + self.dt * (self.slices.len() - 1) as f64
    }

    pub fn to_space_time(&self) -> SpaceTimeField {
        SpaceTimeField::from_slices(self.t0, self.dt, &self.slices)
    }
}

/// Integrate from `u0` with fixed `dt`, recording every `every`-th state
/// (and the initial one).
pub fn integrate_recording(
    u0: &RealField2D,
    dt: f64,
    n_steps: usize,
    every: usize,
    opts: SolverOptions,
) -> Result<Trajectory> {
    let mut solver = Solver::new(u0, SolverOptions { time_step: TimeStep::Fixed(dt), ..opts });
    let mut slices = vec![solver.field()];
    for k in 1..=n_steps {
        solver.step()?;
        if k % every == 0 {
            slices.push(solver.field());
        }
    }
    Ok(Trajectory {
        t0: 0.0,
        dt: dt * every as f64,
        slices,
    })
}

/// Sup over sampled `t` in `[0, T]` of the Duhamel defect
/// `|| u(t) - W(t) u(0) + Int_0^t W(t - t') d/dx(u^2)(t') dt' ||_{L^2}`,
/// with the time integral by cumulative Simpson quadrature.
///
/// `include_integral = false` checks a linear trajectory against the bare
/// flow.
pub fn duhamel_residual(traj: &SpaceTimeField, big_t: f64, include_integral: bool) -> Result<f64> {
    let dt = traj.dt();
    let t0 = traj.t_min();
    if t0 > 1e-12 {
        return Err(Error::WindowTooShort {
            requested: 0.0,
            available: t0,
        });
    }
    let last = traj.time(traj.nt() - 1);
    if big_t > last + 1e-12 {
        return Err(Error::WindowTooShort {
            requested: big_t,
            available: last,
        });
    }
    let anchor = (-t0 / dt).round() as usize;
    assert!(
        (-t0 / dt - anchor as f64).abs() < 1e-9,
        "t = 0 must lie on the sample lattice"
    );
    let j_end = anchor + (big_t / dt).round() as usize;
    let grid = traj.grid();

    let u0 = traj.slice(anchor);
    let base = u0.coeffs().clone();
    let u0_l2 = u0.l2_norm();

    // interaction-picture nonlinearity: h(t) = exp(-i t omega) F[d/dx u^2](t)
    let slabs: Vec<Array2<Complex64>> = (anchor..=j_end)
        .map(|j| {
            let u = traj.slice(j);
            let mut n = nonlinear_term(&u).coeffs().clone();
            // nonlinear_term returns -d/dx(u^2); the defect needs +d/dx(u^2),
            // handled by adding the integral below.
            let t = traj.time(j);
            for ((jx, jy), v) in n.indexed_iter_mut() {
                *v *= Complex64::from_polar(1.0, -t * grid.omega_at(jx, jy));
            }
            n
        })
        .collect();

    let integrals = if include_integral {
        cumulative_simpson_slabs(&slabs, dt)
    } else {
        vec![Array2::zeros((grid.nx(), grid.ny())); slabs.len()]
    };

    let mut worst: f64 = 0.0;
    for (k, j) in (anchor..=j_end).enumerate() {
        let t = traj.time(j);
        let u_t = traj.slice(j).coeffs().clone();
        // defect = u(t) - W(t)[u0 + Int_0^t exp(-i t' omega) F[-d/dx u^2] dt']
        let mut sum = 0.0;
        for ((jx, jy), &c) in u_t.indexed_iter() {
            let w = Complex64::from_polar(1.0, t * grid.omega_at(jx, jy));
            let predicted = w * (base[[jx, jy]] + integrals[k][[jx, jy]]);
            sum += (c - predicted).norm_sqr();
        }
        worst = worst.max((sum * grid.area()).sqrt());
    }
    let _ = u0_l2;
    Ok(worst)
}

fn cumulative_simpson_slabs(slabs: &[Array2<Complex64>], dt: f64) -> Vec<Array2<Complex64>> {
    let n = slabs.len();
    let shape = slabs[0].dim();
    let mut out: Vec<Array2<Complex64>> = vec![Array2::zeros(shape); n];
    for j in 1..n {
        out[j] = if j == 1 {
            if n > 2 {
                (&slabs[0] * Complex64::from(5.0 * dt / 12.0))
                    + (&slabs[1] * Complex64::from(8.0 * dt / 12.0))
                    + (&slabs[2] * Complex64::from(-dt / 12.0))
            } else {
                (&slabs[0] + &slabs[1]) * Complex64::from(dt / 2.0)
            }
        } else if j % 2 == 0 {
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
    out
}
