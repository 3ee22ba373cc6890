//! A real scalar field on the periodic box with paired physical/spectral
//! representations.

use crate::error::Result;
use crate::grid::{Multiplier, SpectralGrid};
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::{Arc, OnceLock};

/// Relative imaginary leakage allowed when a spectral result is read back
/// as a real field.
pub const IMAG_LEAKAGE_TOL: f64 = 1e-12;

/// A real field `u(x, y)` at one time on a [`SpectralGrid`].
///
/// The spectrum is cached on first use; mutation goes through methods that
/// drop the cache, so the two representations can never disagree.
pub struct RealField2D {
    grid: Arc<SpectralGrid>,
    values: Array2<f64>,
    spectrum: OnceLock<Array2<Complex64>>,
}

impl std::fmt::Debug for RealField2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealField2D")
            .field("grid", &self.grid)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl Clone for RealField2D {
    fn clone(&self) -> Self {
        let f = Self {
            grid: Arc::clone(&self.grid),
            values: self.values.clone(),
            spectrum: OnceLock::new(),
        };
        if let Some(s) = self.spectrum.get() {
            let _ = f.spectrum.set(s.clone());
        }
        f
    }
}

impl RealField2D {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self::from_values(grid, Array2::zeros((grid.nx(), grid.ny())))
    }

    pub fn from_values(grid: &Arc<SpectralGrid>, values: Array2<f64>) -> Self {
        assert_eq!(values.dim(), (grid.nx(), grid.ny()));
        Self {
            grid: Arc::clone(grid),
            values,
            spectrum: OnceLock::new(),
        }
    }

    /// Sample `f(x, y)` on the grid.
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let (dx, dy) = (grid.dx(), grid.dy());
        let values = Array2::from_shape_fn((grid.nx(), grid.ny()), |(i, j)| {
            f(i as f64 * dx, j as f64 * dy)
        });
        Self::from_values(grid, values)
    }

    /// Build a field from series coefficients, checking that the inverse
    /// transform is real to within [`IMAG_LEAKAGE_TOL`].
    pub fn from_coeffs(grid: &Arc<SpectralGrid>, coeffs: Array2<Complex64>) -> Self {
        Self::from_coeffs_scaled(grid, coeffs, 0.0)
    }

    /// Like [`Self::from_coeffs`] but with an explicit amplitude scale for
    /// the leakage check, for results that may cancel to roundoff level
    /// (e.g. projections with disjoint supports).
    pub fn from_coeffs_scaled(
        grid: &Arc<SpectralGrid>,
        coeffs: Array2<Complex64>,
        ref_scale: f64,
    ) -> Self {
        let mut work = coeffs.clone();
        grid.fft().inverse(&mut work);
        let max_amp = work.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let max_imag = work.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        let scale = max_amp.max(ref_scale).max(f64::MIN_POSITIVE);
        assert!(
            max_imag <= IMAG_LEAKAGE_TOL * scale,
            "imaginary leakage {max_imag:.3e} on field of amplitude {max_amp:.3e}"
        );
        let values = work.mapv(|c| c.re);
        let f = Self::from_values(grid, values);
        let _ = f.spectrum.set(coeffs);
        f
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Series coefficients `c_k` with `u = sum c_k exp(i k.x)`; Hermitian by
    /// construction. Computed once and cached.
    pub fn coeffs(&self) -> &Array2<Complex64> {
        self.spectrum.get_or_init(|| {
            let mut work = self.values.mapv(|v| Complex64::new(v, 0.0));
            self.grid.fft().forward(&mut work);
            work
        })
    }

    /// Mutable access to the physical values; invalidates the cache.
    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        self.spectrum = OnceLock::new();
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(integral u^2)^(1/2)` by grid quadrature.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_weight();
        (self.values.iter().map(|v| v * v).sum::<f64>() * w).sqrt()
    }

    /// The same L2 norm evaluated in frequency space; equals [`Self::l2_norm`]
    /// to machine precision (Parseval).
    pub fn l2_norm_spectral(&self) -> f64 {
        let sum: f64 = self.coeffs().iter().map(|c| c.norm_sqr()).sum();
        (sum * self.grid.area()).sqrt()
    }

    /// Anisotropic Sobolev norm `|| <|(xi,mu)|>^s c ||`.
    ///
    /// `H^0` equals the L2 norm exactly; the bracket is >= 1 so any real
    /// `s` is admissible.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        if s == 0.0 {
            // No bracket table needed and no Nyquist zeroing: exact L2.
            return self.l2_norm_spectral();
        }
        let table = self.grid.multiplier_table(&Multiplier::SobolevS(s));
        let ny = self.grid.ny();
        let sum: f64 = self
            .coeffs()
            .indexed_iter()
            .map(|((jx, jy), c)| {
                let w = table[jx * ny + jy];
                w * w * c.norm_sqr()
            })
            .sum();
        (sum * self.grid.area()).sqrt()
    }

    /// Apply a scalar Fourier multiplier and return the resulting real field.
    pub fn apply_multiplier(&self, m: &Multiplier) -> Result<RealField2D> {
        let mut coeffs = self.coeffs().clone();
        self.grid.apply_multiplier_to_coeffs(&mut coeffs, m)?;
        Ok(Self::from_coeffs_scaled(&self.grid, coeffs, self.max_abs()))
    }

    /// Pointwise linear combination `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &RealField2D) -> RealField2D {
        let values = &self.values + &(alpha * &other.values);
        Self::from_values(&self.grid, values)
    }

    pub fn scale(&self, alpha: f64) -> RealField2D {
        Self::from_values(&self.grid, alpha * &self.values)
    }

    /// Inner product `integral u v` by grid quadrature.
    pub fn inner(&self, other: &RealField2D) -> f64 {
        let w = self.grid.cell_weight();
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * w
    }
}

/// Gaussian bump `a exp(-((x-cx)^2 + (y-cy)^2) / w^2)` centered in the box
/// by default.
pub fn gaussian(grid: &Arc<SpectralGrid>, amplitude: f64, width: f64) -> RealField2D {
    let (cx, cy) = (grid.lx() / 2.0, grid.ly() / 2.0);
    gaussian_at(grid, amplitude, width, cx, cy)
}

pub fn gaussian_at(
    grid: &Arc<SpectralGrid>,
    amplitude: f64,
    width: f64,
    cx: f64,
    cy: f64,
) -> RealField2D {
    RealField2D::from_fn(grid, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        amplitude * (-(dx * dx + dy * dy) / (width * width)).exp()
    })
}

/// A single Fourier mode pair `2 a cos(xi0 x + mu0 y)` placed exactly on the
/// lattice; `(m1, m2)` are signed mode numbers.
pub fn cosine_mode(grid: &Arc<SpectralGrid>, m1: i64, m2: i64, amplitude: f64) -> RealField2D {
    let xi0 = 2.0 * std::f64::consts::PI * m1 as f64 / grid.lx();
    let mu0 = 2.0 * std::f64::consts::PI * m2 as f64 / grid.ly();
    RealField2D::from_fn(grid, |x, y| 2.0 * amplitude * (xi0 * x + mu0 * y).cos())
}
