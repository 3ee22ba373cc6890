//! Periodic-box discretization and scalar Fourier multipliers.
//!
//! The box is `[0, Lx) x [0, Ly)` with `nx x ny` points and frequency
//! lattice `xi_j = 2 pi j / Lx`, `mu_k = 2 pi k / Ly` on the standard
//! signed index range. All anisotropic weights use the modulus
//! `|(xi, mu)| = sqrt(3 xi^2 + mu^2)` and the bracket `<a> = sqrt(1 + a^2)`.

use crate::error::{Error, Result};
use crate::fft::{signed_index, Fft2};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Dispersion relation of the linearized flow, `omega(xi, mu) = xi (xi^2 + mu^2)`.
///
/// Odd in `xi`, even in `mu`.
pub fn omega(xi: f64, mu: f64) -> f64 {
    xi * (xi * xi + mu * mu)
}

/// Anisotropic modulus `sqrt(3 xi^2 + mu^2)`.
pub fn aniso_modulus(xi: f64, mu: f64) -> f64 {
    (3.0 * xi * xi + mu * mu).sqrt()
}

/// Japanese bracket `<a> = (1 + a^2)^(1/2)`.
pub fn bracket(a: f64) -> f64 {
    (1.0 + a * a).sqrt()
}

/// Anisotropic bracket `<|(xi, mu)|>`, the weight of the Sobolev scale.
pub fn aniso_bracket(xi: f64, mu: f64) -> f64 {
    (1.0 + 3.0 * xi * xi + mu * mu).sqrt()
}

/// Symbol of the resonance-detecting multiplier `K = |3 xi^2 - mu^2|`.
pub fn k_symbol(xi: f64, mu: f64) -> f64 {
    (3.0 * xi * xi - mu * mu).abs()
}

/// Multi-index `(i1, i2)`: `i1` x-derivatives and `i2` y-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub i1: u32,
    pub i2: u32,
}

impl MultiIndex {
    pub fn new(i1: u32, i2: u32) -> Self {
        Self { i1, i2 }
    }

    /// `|i| = i1 + i2`.
    pub fn len(&self) -> u32 {
        self.i1 + self.i2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Partial order: `j <= i` iff both components are dominated.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.i1 <= other.i1 && self.i2 <= other.i2
    }

    /// Strict order: `j < i` iff `j <= i` and they differ.
    pub fn lt(&self, other: &MultiIndex) -> bool {
        self.le(other) && self != other
    }

    /// All multi-indices `j <= self` in lexicographic order.
    pub fn divisors(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..=self.i1).flat_map(move |a| (0..=self.i2).map(move |b| MultiIndex::new(a, b)))
    }
}

/// Fourier multiplier specifications.
///
/// All symbols except `PartialX` and `Partial` follow the modulus
/// convention `|P(i tau, i xi, i eta)|`, so they are real, even, and
/// preserve Hermitian symmetry. `PartialX`/`Partial` use the signed
/// symbol `(i xi)^a (i mu)^b` and are the Leibniz-compatible derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `<|(xi, mu)|>^s`: the Sobolev weight.
    SobolevS(f64),
    /// `|3 xi^2 - mu^2|^theta`.
    KPow(f64),
    /// `|xi|^a`.
    DxPow(f64),
    /// `|mu|^a`.
    DyPow(f64),
    /// `|xi|^{i1} |mu|^{i2}` (modulus convention, not Leibniz-compatible).
    DMulti(MultiIndex),
    /// Signed `i xi`, the actual x-derivative.
    PartialX,
    /// Signed `(i xi)^{i1} (i mu)^{i2}`, the actual mixed derivative.
    Partial(MultiIndex),
}

impl Multiplier {
    fn cache_key(&self) -> (u8, u64, u64) {
        match self {
            Multiplier::SobolevS(s) => (0, s.to_bits(), 0),
            Multiplier::KPow(t) => (1, t.to_bits(), 0),
            Multiplier::DxPow(a) => (2, a.to_bits(), 0),
            Multiplier::DyPow(a) => (3, a.to_bits(), 0),
            Multiplier::DMulti(i) => (4, i.i1 as u64, i.i2 as u64),
            Multiplier::PartialX => (5, 0, 0),
            Multiplier::Partial(i) => (6, i.i1 as u64, i.i2 as u64),
        }
    }

    fn is_signed(&self) -> bool {
        matches!(self, Multiplier::PartialX | Multiplier::Partial(_))
    }

    /// Real symbols; for signed multipliers this is the magnitude part and
    /// the imaginary unit powers are applied separately.
    fn symbol(&self, xi: f64, mu: f64) -> f64 {
        match self {
            Multiplier::SobolevS(s) => aniso_bracket(xi, mu).powf(*s),
            Multiplier::KPow(t) => {
                let k = k_symbol(xi, mu);
                if k == 0.0 && *t <= 0.0 {
                    if *t == 0.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    k.powf(*t)
                }
            }
            Multiplier::DxPow(a) => pow_or_inf(xi.abs(), *a),
            Multiplier::DyPow(a) => pow_or_inf(mu.abs(), *a),
            Multiplier::DMulti(i) => xi.abs().powi(i.i1 as i32) * mu.abs().powi(i.i2 as i32),
            Multiplier::PartialX => xi,
            Multiplier::Partial(i) => xi.powi(i.i1 as i32) * mu.powi(i.i2 as i32),
        }
    }

    /// Power of `i` carried by a signed symbol.
    fn imaginary_power(&self) -> u32 {
        match self {
            Multiplier::PartialX => 1,
            Multiplier::Partial(i) => i.len(),
            _ => 0,
        }
    }
}

fn pow_or_inf(base: f64, a: f64) -> f64 {
    if base == 0.0 && a < 0.0 {
        f64::INFINITY
    } else if base == 0.0 && a == 0.0 {
        1.0
    } else {
        base.powf(a)
    }
}

/// Periodic box geometry, its discrete frequency lattice, and multiplier caches.
///
/// Immutable after construction; safely shareable across threads.
pub struct SpectralGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    xi: Vec<f64>,
    mu: Vec<f64>,
    omega_table: Vec<f64>,
    fft: Fft2,
    multiplier_cache: Mutex<HashMap<(u8, u64, u64), Arc<Vec<f64>>>>,
}

impl SpectralGrid {
    /// A box of size `lx x ly` sampled on `nx x ny` points.
    ///
    /// Panics if `nx`/`ny` are odd or below 8, or the box degenerate:
    /// those are construction errors, not runtime conditions.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Arc<Self> {
        assert!(nx >= 8 && nx % 2 == 0, "nx must be even and >= 8");
        assert!(ny >= 8 && ny % 2 == 0, "ny must be even and >= 8");
        assert!(lx > 0.0 && ly > 0.0, "box lengths must be positive");
        let xi: Vec<f64> = (0..nx)
            .map(|j| 2.0 * std::f64::consts::PI * signed_index(j, nx) as f64 / lx)
            .collect();
        let mu: Vec<f64> = (0..ny)
            .map(|k| 2.0 * std::f64::consts::PI * signed_index(k, ny) as f64 / ly)
            .collect();
        let mut omega_table = vec![0.0; nx * ny];
        for (jx, &x) in xi.iter().enumerate() {
            for (jy, &y) in mu.iter().enumerate() {
                omega_table[jx * ny + jy] = omega(x, y);
            }
        }
        Arc::new(Self {
            nx,
            ny,
            lx,
            ly,
            xi,
            mu,
            omega_table,
            fft: Fft2::new(nx, ny),
            multiplier_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Default box of the artifact: `32 pi x 32 pi` on `256^2` points.
    pub fn default_box() -> Arc<Self> {
        Self::new(256, 256, 32.0 * std::f64::consts::PI, 32.0 * std::f64::consts::PI)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    /// Box area.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Quadrature weight of one grid cell.
    pub fn cell_weight(&self) -> f64 {
        self.area() / (self.nx * self.ny) as f64
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Frequency of x-bin `jx`.
    pub fn xi(&self, jx: usize) -> f64 {
        self.xi[jx]
    }

    /// Frequency of y-bin `jy`.
    pub fn mu(&self, jy: usize) -> f64 {
        self.mu[jy]
    }

    /// Cached `omega(xi_jx, mu_jy)`.
    pub fn omega_at(&self, jx: usize, jy: usize) -> f64 {
        self.omega_table[jx * self.ny + jy]
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// True on the Nyquist row/column, which every multiplier zeroes.
    pub fn is_nyquist(&self, jx: usize, jy: usize) -> bool {
        jx == self.nx / 2 || jy == self.ny / 2
    }

    /// True if the bin survives the 2/3-rule dealiasing mask
    /// (`|m| <= n/3` on each axis; Nyquist excluded).
    pub fn in_dealias_band(&self, jx: usize, jy: usize) -> bool {
        let mx = signed_index(jx, self.nx).unsigned_abs() as usize;
        let my = signed_index(jy, self.ny).unsigned_abs() as usize;
        mx * 3 <= self.nx && my * 3 <= self.ny && !self.is_nyquist(jx, jy)
    }

    /// The table of a real (modulus-convention) symbol, cached per grid.
    /// Nyquist entries are zeroed.
    pub fn multiplier_table(&self, m: &Multiplier) -> Arc<Vec<f64>> {
        let key = m.cache_key();
        let mut cache = self.multiplier_cache.lock().unwrap();
        if let Some(t) = cache.get(&key) {
            return Arc::clone(t);
        }
        let mut table = vec![0.0; self.nx * self.ny];
        for jx in 0..self.nx {
            for jy in 0..self.ny {
                table[jx * self.ny + jy] = if self.is_nyquist(jx, jy) {
                    0.0
                } else {
                    m.symbol(self.xi[jx], self.mu[jy])
                };
            }
        }
        let table = Arc::new(table);
        cache.insert(key, Arc::clone(&table));
        table
    }

    /// Pointwise spectral multiplication `c_k -> symbol(k) c_k`.
    ///
    /// Signals `ZeroModeSingularity` when a negative power meets a
    /// vanishing symbol carried by a nonzero coefficient; coefficients at
    /// such points are zeroed when they are negligible.
    pub fn apply_multiplier_to_coeffs(
        &self,
        coeffs: &mut Array2<Complex64>,
        m: &Multiplier,
    ) -> Result<()> {
        let table = self.multiplier_table(m);
        let l2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let tol = 1e-12 * l2.max(f64::MIN_POSITIVE);
        let ipow = m.imaginary_power() % 4;
        let unit = match ipow {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        for ((jx, jy), c) in coeffs.indexed_iter_mut() {
            let s = table[jx * self.ny + jy];
            if s.is_infinite() {
                if c.norm() > tol {
                    return Err(Error::ZeroModeSingularity {
                        xi: self.xi[jx],
                        mu: self.mu[jy],
                    });
                }
                *c = Complex64::default();
            } else if m.is_signed() {
                *c *= unit * s;
            } else {
                *c *= s;
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}
