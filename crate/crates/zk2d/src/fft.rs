//! FFT plumbing for 2D and 3D complex transforms.
//!
//! Convention: `forward` produces Fourier *series* coefficients, i.e. the
//! unnormalized DFT divided by the number of points, so that
//! `u(x) = sum_k c_k exp(i k.x)` holds exactly on the grid and `inverse`
//! is the plain unnormalized inverse DFT. Parseval then reads
//! `integral |u|^2 = volume * sum |c_k|^2`.

use ndarray::parallel::prelude::*;
use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached 1D plans for one axis length.
#[derive(Clone)]
struct AxisPlan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        Self {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }
}

/// Run `plan` over every lane of `data` along `axis`, parallelizing over
/// chunks of the longest perpendicular axis (ndarray's rayon support does
/// not cover lane iterators directly).
macro_rules! lane_runner {
    ($name:ident, $arr:ty, $ndim:expr) => {
        fn $name(data: &mut $arr, axis: Axis, plan: &Arc<dyn Fft<f64>>) {
            let n = plan.len();
            let dims = data.raw_dim();
            let split = (0..$ndim)
                .filter(|&k| k != axis.0)
                .max_by_key(|&k| dims[k])
                .expect("perpendicular axis");
            let chunk = (dims[split] / (4 * rayon::current_num_threads()).max(1)).max(1);
            data.axis_chunks_iter_mut(Axis(split), chunk)
                .into_par_iter()
                .for_each(|mut block| {
                    let mut buf = vec![Complex64::default(); n];
                    let mut scratch =
                        vec![Complex64::default(); plan.get_inplace_scratch_len()];
                    for mut lane in block.lanes_mut(axis) {
                        if let Some(slice) = lane.as_slice_mut() {
                            plan.process_with_scratch(slice, &mut scratch);
                        } else {
                            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                                *b = *v;
                            }
                            plan.process_with_scratch(&mut buf, &mut scratch);
                            for (v, b) in lane.iter_mut().zip(buf.iter()) {
                                *v = *b;
                            }
                        }
                    }
                });
        }
    };
}

lane_runner!(run_lanes, Array3<Complex64>, 3);
lane_runner!(run_lanes_2d, Array2<Complex64>, 2);

/// Planned 2D transform for an `nx x ny` grid.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    px: AxisPlan,
    py: AxisPlan,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            px: AxisPlan::new(&mut planner, nx),
            py: AxisPlan::new(&mut planner, ny),
        }
    }

    /// In-place physical values -> series coefficients.
    pub fn forward(&self, data: &mut Array2<Complex64>) {
        debug_assert_eq!(data.dim(), (self.nx, self.ny));
        run_lanes_2d(data, Axis(1), &self.py.fwd);
        run_lanes_2d(data, Axis(0), &self.px.fwd);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        data.par_mapv_inplace(|v| v * scale);
    }

    /// In-place series coefficients -> physical values.
    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        debug_assert_eq!(data.dim(), (self.nx, self.ny));
        run_lanes_2d(data, Axis(1), &self.py.inv);
        run_lanes_2d(data, Axis(0), &self.px.inv);
    }
}

/// Planned 3D transform for an `nt x nx x ny` block.
pub struct Fft3 {
    nt: usize,
    nx: usize,
    ny: usize,
    pt: AxisPlan,
    px: AxisPlan,
    py: AxisPlan,
}

impl Fft3 {
    pub fn new(nt: usize, nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nt,
            nx,
            ny,
            pt: AxisPlan::new(&mut planner, nt),
            px: AxisPlan::new(&mut planner, nx),
            py: AxisPlan::new(&mut planner, ny),
        }
    }

    pub fn forward(&self, data: &mut Array3<Complex64>) {
        debug_assert_eq!(data.dim(), (self.nt, self.nx, self.ny));
        run_lanes(data, Axis(2), &self.py.fwd);
        run_lanes(data, Axis(1), &self.px.fwd);
        run_lanes(data, Axis(0), &self.pt.fwd);
        let scale = 1.0 / (self.nt * self.nx * self.ny) as f64;
        data.par_mapv_inplace(|v| v * scale);
    }

    pub fn inverse(&self, data: &mut Array3<Complex64>) {
        debug_assert_eq!(data.dim(), (self.nt, self.nx, self.ny));
        run_lanes(data, Axis(2), &self.py.inv);
        run_lanes(data, Axis(1), &self.px.inv);
        run_lanes(data, Axis(0), &self.pt.inv);
    }
}

/// Signed lattice index for FFT bin `j` of an `n`-point axis:
/// `0, 1, .., n/2-1, -n/2, .., -1`.
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT bin of a signed lattice index, inverse of [`signed_index`].
pub fn fft_bin(m: i64, n: usize) -> usize {
    if m >= 0 {
        m as usize
    } else {
        (m + n as i64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::Array2;

    /// O(n^2) reference DFT, independent of the rustfft path.
    fn direct_series_coefficients(u: &Array2<Complex64>) -> Array2<Complex64> {
        let (nx, ny) = u.dim();
        let mut out = Array2::zeros((nx, ny));
        for kx in 0..nx {
            for ky in 0..ny {
                let mut acc = Complex64::default();
                for jx in 0..nx {
                    for jy in 0..ny {
                        let phase = -2.0 * std::f64::consts::PI
                            * (kx as f64 * jx as f64 / nx as f64
                                + ky as f64 * jy as f64 / ny as f64);
                        acc += u[[jx, jy]] * Complex64::from_polar(1.0, phase);
                    }
                }
                out[[kx, ky]] = acc / (nx * ny) as f64;
            }
        }
        out
    }

    #[test]
    fn matches_direct_dft() {
        let (nx, ny) = (8, 12);
        let mut rng = 0u64;
        let mut next = || {
            // xorshift, deterministic
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng = rng.wrapping_add(0x9e3779b97f4a7c15);
            (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let u = Array2::from_shape_fn((nx, ny), |_| Complex64::new(next(), next()));
        let expected = direct_series_coefficients(&u);
        let mut got = u.clone();
        Fft2::new(nx, ny).forward(&mut got);
        for (a, b) in got.iter().zip(expected.iter()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-10);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn round_trip_2d() {
        let (nx, ny) = (16, 16);
        let u = Array2::from_shape_fn((nx, ny), |(i, j)| {
            Complex64::new((i as f64).sin() + 0.3 * j as f64, 0.0)
        });
        let plan = Fft2::new(nx, ny);
        let mut v = u.clone();
        plan.forward(&mut v);
        plan.inverse(&mut v);
        for (a, b) in v.iter().zip(u.iter()) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn round_trip_3d() {
        let (nt, nx, ny) = (6, 8, 10);
        let u = ndarray::Array3::from_shape_fn((nt, nx, ny), |(t, i, j)| {
            Complex64::new((t * 31 + i * 7 + j) as f64 * 0.01 - 0.5, 0.0)
        });
        let plan = Fft3::new(nt, nx, ny);
        let mut v = u.clone();
        plan.forward(&mut v);
        plan.inverse(&mut v);
        for (a, b) in v.iter().zip(u.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_coefficient() {
        let (nx, ny) = (16, 16);
        // u = exp(i 2pi (3 jx / nx - 2 jy / ny)) must give c = 1 at bin (3, ny-2).
        let u = Array2::from_shape_fn((nx, ny), |(jx, jy)| {
            let phase = 2.0 * std::f64::consts::PI
                * (3.0 * jx as f64 / nx as f64 - 2.0 * jy as f64 / ny as f64);
            Complex64::from_polar(1.0, phase)
        });
        let mut c = u.clone();
        Fft2::new(nx, ny).forward(&mut c);
        for ((kx, ky), v) in c.indexed_iter() {
            let expect = if kx == 3 && ky == ny - 2 { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_index_round_trip() {
        for n in [8usize, 12, 16] {
            for j in 0..n {
                assert_eq!(fft_bin(signed_index(j, n), n), j);
            }
        }
    }
}
