//! Littlewood-Paley apparatus: smooth dyadic cutoffs, the frequency and
//! modulation projectors, and shell-energy spectra.
//!
//! The base cutoff `chi0` is smooth, non-increasing, equal to 1 on
//! `r <= 5/4` and 0 on `r >= 8/5`; `chi(r) = chi0(r/2) - chi0(r)` and
//! `chi_j(r) = chi(r / 2^j)`. These telescope exactly:
//! `chi0(r) + sum_{j<=J} chi_j(r) = chi0(r / 2^{J+1})`.

use crate::field::RealField2D;
use crate::grid::aniso_bracket;
use num_complex::Complex64;

/// `exp(-1/x)` for `x > 0`, else 0; the germ of the smoothstep.
fn bump_germ(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// C-infinity monotone step: 0 for `x <= 0`, 1 for `x >= 1`.
fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let g = bump_germ(x);
        g / (g + bump_germ(1.0 - x))
    }
}

/// Base cutoff: 1 on `[0, 5/4]`, 0 on `[8/5, inf)`, smooth and
/// non-increasing in between.
pub fn chi0(r: f64) -> f64 {
    1.0 - smoothstep((r - 1.25) / (1.6 - 1.25))
}

/// Annular cutoff `chi0(r/2) - chi0(r)`, supported on `[5/4, 16/5]`.
pub fn chi(r: f64) -> f64 {
    chi0(r / 2.0) - chi0(r)
}

/// `chi_j(r) = chi(r / 2^j)`.
pub fn chi_j(r: f64, j: u32) -> f64 {
    chi(r / (1u64 << j) as f64)
}

/// `chi_N` for a dyadic `N = 2^j >= 2`, i.e. `chi_j(r) = chi(r / N)`.
///
/// `N = 1` denotes the low block `chi0(r/2) = chi0(r) + chi(r)`: it
/// absorbs the first annulus so that the low block and the `N >= 2`
/// shells partition unity without a gap.
pub fn chi_n(r: f64, n: u64) -> f64 {
    debug_assert!(n.is_power_of_two());
    if n == 1 {
        chi0(r / 2.0)
    } else {
        chi(r / n as f64)
    }
}

/// Smallest `J` such that the telescoped family `chi0 + sum_{j<=J} chi_j`
/// is identically 1 up to value `r_max`, i.e. `5/4 * 2^(J+1) >= r_max`.
pub fn shells_for(r_max: f64) -> u32 {
    let mut j = 0u32;
    while 1.25 * ((1u64 << (j + 1)) as f64) < r_max {
        j += 1;
    }
    j
}

/// Frequency projector `P_N`: spectral multiplication by
/// `chi_N(<|(xi, mu)|>)`. Requires dyadic `N >= 2`; the low block is
/// [`project_p_low`].
pub fn project_p(f: &RealField2D, n: u64) -> RealField2D {
    assert!(n >= 2 && n.is_power_of_two(), "P_N needs dyadic N >= 2");
    project_with(f, |b| chi_n(b, n))
}

/// The low block `chi0(<|(xi, mu)|> / 2)`.
pub fn project_p_low(f: &RealField2D) -> RealField2D {
    project_with(f, |b| chi_n(b, 1))
}

fn project_with(f: &RealField2D, cutoff: impl Fn(f64) -> f64) -> RealField2D {
    let grid = f.grid();
    let mut coeffs = f.coeffs().clone();
    for ((jx, jy), c) in coeffs.indexed_iter_mut() {
        if grid.is_nyquist(jx, jy) {
            *c = Complex64::default();
        } else {
            *c *= cutoff(aniso_bracket(grid.xi(jx), grid.mu(jy)));
        }
    }
    RealField2D::from_coeffs_scaled(grid, coeffs, f.max_abs())
}

/// One row of a shell-energy spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellEnergy {
    /// Dyadic shell; `1` is the low block.
    pub n: u64,
    pub energy: f64,
}

/// Shell energies `||P_N u||_{L^2}^2` (plus the low block at `N = 1`).
///
/// Adjacent smooth shells overlap, so the energies sum to `||u||^2` only
/// up to a double-counting factor bounded by 2. See
/// [`shell_spectrum_sharp`] for the exactly-summing variant.
pub fn shell_spectrum(u: &RealField2D) -> Vec<ShellEnergy> {
    shell_energies(u, false)
}

/// Sharp-partition shell energies: weights `chi_N^2 / sum_M chi_M^2`, so
/// the energies sum to `||u||_{L^2}^2` exactly (Nyquist modes excluded).
pub fn shell_spectrum_sharp(u: &RealField2D) -> Vec<ShellEnergy> {
    shell_energies(u, true)
}

fn shell_energies(u: &RealField2D, sharp: bool) -> Vec<ShellEnergy> {
    let grid = u.grid();
    let max_bracket = (0..grid.nx())
        .flat_map(|jx| (0..grid.ny()).map(move |jy| (jx, jy)))
        .filter(|&(jx, jy)| !grid.is_nyquist(jx, jy))
        .map(|(jx, jy)| aniso_bracket(grid.xi(jx), grid.mu(jy)))
        .fold(0.0, f64::max);
    let jmax = shells_for(max_bracket);
    let area = grid.area();
    let mut energies = vec![0.0; jmax as usize + 2];
    for ((jx, jy), c) in u.coeffs().indexed_iter() {
        if grid.is_nyquist(jx, jy) {
            continue;
        }
        let b = aniso_bracket(grid.xi(jx), grid.mu(jy));
        let mut weights: Vec<f64> = Vec::with_capacity(jmax as usize + 2);
        weights.push(chi_n(b, 1).powi(2));
        for j in 1..=(jmax + 1) {
            weights.push(chi_j(b, j).powi(2));
        }
        if sharp {
            let total: f64 = weights.iter().sum();
            if total > 0.0 {
                for w in weights.iter_mut() {
                    *w /= total;
                }
            }
        }
        let e = c.norm_sqr() * area;
        for (slot, w) in weights.iter().enumerate() {
            energies[slot] += w * e;
        }
    }
    energies
        .into_iter()
        .enumerate()
        .map(|(slot, energy)| ShellEnergy {
            n: 1u64 << slot,
            energy,
        })
        .collect()
}
