//! Dyadic block fields on the lab lattice and their product bounds.
//!
//! Fields are sparse Hermitian coefficient maps on integer `(tau, xi, mu)`
//! triples; products are exact convolutions on Z^3, so no dealiasing or
//! padding questions arise here.

use super::SignSet;
use crate::dyadic::chi_n;
use crate::error::{Error, Result};
use crate::grid::{aniso_bracket, bracket, omega};
use crate::rng::{normal_pair, stream, Purpose};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

/// Integer frequency lattice with `extent` points per axis: valid indices
/// are `|m| <= extent/2 - 1` (the Nyquist line is excluded). The physical
/// box is `(2 pi)^3`, so indices are the frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabLattice {
    pub extent: usize,
}

impl LabLattice {
    pub fn new(extent: usize) -> Self {
        assert!(extent >= 8 && extent % 2 == 0);
        Self { extent }
    }

    pub fn half(&self) -> i64 {
        (self.extent / 2) as i64 - 1
    }

    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(3)
    }

    pub fn contains(&self, p: [i64; 3]) -> bool {
        let h = self.half();
        p.iter().all(|m| m.abs() <= h)
    }
}

/// A dyadic `(N, L)` block selector with optional sign-set mask and cone
/// restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicBlockSpec {
    /// Spatial shell (bracket scale); dyadic, `1` is the low block.
    pub n: u64,
    /// Modulation shell; dyadic, `1` is the low block.
    pub l: u64,
    /// Sign-set selector used when forming masked products.
    pub sign_set: Option<SignSet>,
    /// When set, the block support is restricted to the near-cone
    /// `|mu| ~ sqrt(3) |xi|` with this `alpha`.
    pub cone_alpha: Option<f64>,
}

impl DyadicBlockSpec {
    pub fn new(n: u64, l: u64) -> Self {
        assert!(n.is_power_of_two() && l.is_power_of_two());
        Self {
            n,
            l,
            sign_set: None,
            cone_alpha: None,
        }
    }

    pub fn with_sign_set(mut self, s: SignSet) -> Self {
        self.sign_set = Some(s);
        self
    }

    pub fn with_cone(mut self, alpha: f64) -> Self {
        self.cone_alpha = Some(alpha);
        self
    }

    /// Lattice points of the block (chi-support membership).
    pub fn support(&self, lat: &LabLattice) -> Vec<[i64; 3]> {
        let h = lat.half();
        let mut pts = Vec::new();
        for xi in -h..=h {
            for mu in -h..=h {
                let b = aniso_bracket(xi as f64, mu as f64);
                if chi_n(b, self.n) <= 0.0 {
                    continue;
                }
                if let Some(alpha) = self.cone_alpha {
                    if !super::in_cone(xi as f64, mu as f64, alpha) {
                        continue;
                    }
                }
                let w = omega(xi as f64, mu as f64);
                for tau in -h..=h {
                    let m = bracket(tau as f64 - w);
                    if chi_n(m, self.l) > 0.0 {
                        pts.push([tau, xi, mu]);
                    }
                }
            }
        }
        pts
    }
}

/// Sparse Hermitian coefficient field on the lab lattice.
#[derive(Debug, Clone)]
pub struct SparseField {
    pub lattice: LabLattice,
    pub coeffs: HashMap<[i64; 3], Complex64>,
}

impl SparseField {
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.values().map(|c| c.norm_sqr()).sum();
        (s * self.lattice.volume()).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.l2_norm();
        if n > 0.0 {
            for c in self.coeffs.values_mut() {
                *c /= n;
            }
        }
    }

    /// `integral u v` of two real fields (L2 pairing through coefficients).
    pub fn inner(&self, other: &SparseField) -> f64 {
        let mut acc = Complex64::default();
        for (p, c) in &self.coeffs {
            if let Some(d) = other.coeffs.get(p) {
                acc += c * d.conj();
            }
        }
        acc.re * self.lattice.volume()
    }

    /// L2 norm of the pointwise product `self * other`, by exact sparse
    /// convolution; `mask` restricts which spatial pairs contribute.
    pub fn product_l2(&self, other: &SparseField, mask: Option<SignSet>) -> f64 {
        let mut conv: HashMap<[i64; 3], Complex64> =
            HashMap::with_capacity(self.coeffs.len() + other.coeffs.len());
        for (p, cp) in &self.coeffs {
            for (q, cq) in &other.coeffs {
                if let Some(m) = mask {
                    if !m.contains(p[1] as f64, q[1] as f64, p[2] as f64, q[2] as f64) {
                        continue;
                    }
                }
                let r = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                *conv.entry(r).or_default() += cp * cq;
            }
        }
        let s: f64 = conv.values().map(|c| c.norm_sqr()).sum();
        (s * self.lattice.volume()).sqrt()
    }
}

/// Random block field: complex Gaussian coefficients on the block's
/// lattice points, Hermitian-symmetrized and normalized to unit L2.
pub fn make_block(spec: &DyadicBlockSpec, lat: &LabLattice, seed: u64, trial: u64) -> Result<SparseField> {
    let pts = spec.support(lat);
    if pts.is_empty() {
        return Err(Error::EmptyShell { n: spec.n, l: spec.l });
    }
    let mut rng = stream(seed, Purpose::BlockTrial, trial);
    let mut coeffs: HashMap<[i64; 3], Complex64> = HashMap::with_capacity(2 * pts.len());
    for p in pts {
        let canonical = match p.iter().find(|&&m| m != 0) {
            Some(&first) => first > 0,
            None => true, // origin: real coefficient
        };
        if !canonical {
            continue; // the conjugate partner fills it in
        }
        let (g1, g2) = normal_pair(&mut rng);
        if p == [0, 0, 0] {
            coeffs.insert(p, Complex64::new(g1, 0.0));
        } else {
            let c = Complex64::new(g1, g2);
            coeffs.insert(p, c);
            coeffs.insert([-p[0], -p[1], -p[2]], c.conj());
        }
    }
    let mut f = SparseField {
        lattice: *lat,
        coeffs,
    };
    f.normalize();
    Ok(f)
}

/// `|<f, g>|` for two independently seeded blocks (decorrelation probe).
pub fn block_correlation(spec: &DyadicBlockSpec, lat: &LabLattice, seed: u64, t1: u64, t2: u64) -> Result<f64> {
    let a = make_block(spec, lat, seed, t1)?;
    let b = make_block(spec, lat, seed, t2)?;
    Ok(a.inner(&b).abs())
}

/// Which block-interaction bound a product ratio is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    /// `||b1 b2|| <= C max(L1,L2)^(1/2) max(N1,N2)`.
    Measure,
    /// Separated shells: `||b1 b2|| <= C max(N)^(1/2)/min(N) (L1 L2)^(1/2)`,
    /// requires `N2 >= 4 N1` or `N1 >= 4 N2`.
    Measure2,
    /// Sign-masked high/high: `||J_i(b1, b2)|| <= C N1^(-1/2) (L1 L2)^(1/2)`,
    /// requires `N1/2 <= N2 <= 2 N1` and a sign-set selector.
    Measure3,
}

fn mode_rhs(mode: ProductMode, s1: &DyadicBlockSpec, s2: &DyadicBlockSpec) -> Result<(f64, Option<SignSet>)> {
    let (n1, n2) = (s1.n as f64, s2.n as f64);
    let (l1, l2) = (s1.l as f64, s2.l as f64);
    match mode {
        ProductMode::Measure => Ok((l1.max(l2).sqrt() * n1.max(n2), None)),
        ProductMode::Measure2 => {
            if !(s2.n >= 4 * s1.n || s1.n >= 4 * s2.n) {
                return Err(Error::PreconditionViolated(format!(
                    "measure2 needs N2 >= 4 N1 or N1 >= 4 N2, got N1 = {}, N2 = {}",
                    s1.n, s2.n
                )));
            }
            Ok((n1.max(n2).sqrt() / n1.min(n2) * (l1 * l2).sqrt(), None))
        }
        ProductMode::Measure3 => {
            if !(2 * s2.n >= s1.n && s2.n <= 2 * s1.n) {
                return Err(Error::PreconditionViolated(format!(
                    "measure3 needs N1/2 <= N2 <= 2 N1, got N1 = {}, N2 = {}",
                    s1.n, s2.n
                )));
            }
            let sign = s1.sign_set.or(s2.sign_set).ok_or_else(|| {
                Error::PreconditionViolated("measure3 needs a sign-set selector".into())
            })?;
            Ok((n1.powf(-0.5) * (l1 * l2).sqrt(), Some(sign)))
        }
    }
}

/// Max over `trials` of `||product|| / rhs` with unit-norm random blocks.
pub fn block_product_ratio(
    spec1: &DyadicBlockSpec,
    spec2: &DyadicBlockSpec,
    mode: ProductMode,
    trials: u64,
    lat: &LabLattice,
    seed: u64,
) -> Result<f64> {
    let (rhs, mask) = mode_rhs(mode, spec1, spec2)?;
    // fail fast on empty shells
    make_block(spec1, lat, seed, 0)?;
    make_block(spec2, lat, seed, 1)?;
    let max = (0..trials)
        .into_par_iter()
        .map(|t| {
            let b1 = make_block(spec1, lat, seed, 2 * t).expect("support checked");
            let b2 = make_block(spec2, lat, seed, 2 * t + 1).expect("support checked");
            b1.product_l2(&b2, mask) / rhs
        })
        .reduce(|| 0.0, f64::max);
    Ok(max)
}

/// Max ratio over the complete Hermitian-pair basis of both blocks: every
/// basis element is `(delta_p + delta_{-p}) / sqrt(2 V)`, and every pair
/// product is evaluated exactly. This is the small-instance oracle the
/// randomized trials are compared against.
pub fn exhaustive_basis_ratio(
    spec1: &DyadicBlockSpec,
    spec2: &DyadicBlockSpec,
    mode: ProductMode,
    lat: &LabLattice,
) -> Result<f64> {
    let (rhs, mask) = mode_rhs(mode, spec1, spec2)?;
    let canon = |pts: Vec<[i64; 3]>| -> Vec<[i64; 3]> {
        pts.into_iter()
            .filter(|p| match p.iter().find(|&&m| m != 0) {
                Some(&first) => first > 0,
                None => true,
            })
            .collect()
    };
    let pts1 = canon(spec1.support(lat));
    let pts2 = canon(spec2.support(lat));
    if pts1.is_empty() {
        return Err(Error::EmptyShell { n: spec1.n, l: spec1.l });
    }
    if pts2.is_empty() {
        return Err(Error::EmptyShell { n: spec2.n, l: spec2.l });
    }
    let amp = 1.0 / (2.0 * lat.volume()).sqrt();
    let best = pts1
        .par_iter()
        .map(|&p| {
            let mut e1 = SparseField {
                lattice: *lat,
                coeffs: HashMap::new(),
            };
            if p == [0, 0, 0] {
                e1.coeffs.insert(p, Complex64::new((1.0f64 / lat.volume()).sqrt(), 0.0));
            } else {
                e1.coeffs.insert(p, Complex64::new(amp, 0.0));
                e1.coeffs.insert([-p[0], -p[1], -p[2]], Complex64::new(amp, 0.0));
            }
            let mut local: f64 = 0.0;
            for &q in &pts2 {
                let mut e2 = SparseField {
                    lattice: *lat,
                    coeffs: HashMap::new(),
                };
                if q == [0, 0, 0] {
                    e2.coeffs
                        .insert(q, Complex64::new((1.0f64 / lat.volume()).sqrt(), 0.0));
                } else {
                    e2.coeffs.insert(q, Complex64::new(amp, 0.0));
                    e2.coeffs.insert([-q[0], -q[1], -q[2]], Complex64::new(amp, 0.0));
                }
                local = local.max(e1.product_l2(&e2, mask) / rhs);
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat16() -> LabLattice {
        LabLattice::new(16)
    }

    #[test]
    fn block_is_unit_norm_and_hermitian() {
        let spec = DyadicBlockSpec::new(2, 2);
        let b = make_block(&spec, &lat16(), 42, 0).unwrap();
        assert!((b.l2_norm() - 1.0).abs() < 1e-12);
        for (p, c) in &b.coeffs {
            let q = [-p[0], -p[1], -p[2]];
            let d = b.coeffs.get(&q).expect("conjugate partner");
            assert!((c - d.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn block_support_lies_in_shells() {
        let spec = DyadicBlockSpec::new(4, 4);
        let b = make_block(&spec, &LabLattice::new(16), 1, 0).unwrap();
        for p in b.coeffs.keys() {
            let br = aniso_bracket(p[1] as f64, p[2] as f64);
            assert!(chi_n(br, 4) > 0.0, "bracket {br} outside shell 4");
            let m = bracket(p[0] as f64 - omega(p[1] as f64, p[2] as f64));
            assert!(chi_n(m, 4) > 0.0, "modulation {m} outside shell 4");
        }
    }

    #[test]
    fn empty_shell_detected() {
        // N = 16 needs brackets >= 20, unreachable on a 16-point lattice.
        let spec = DyadicBlockSpec::new(16, 2);
        assert!(matches!(
            make_block(&spec, &lat16(), 3, 0),
            Err(Error::EmptyShell { .. })
        ));
    }

    #[test]
    fn different_seeds_decorrelate() {
        let spec = DyadicBlockSpec::new(2, 2);
        let lat = LabLattice::new(24);
        let mut worst: f64 = 0.0;
        for t in 0..100 {
            let c = block_correlation(&spec, &lat, 7, 2 * t, 2 * t + 1).unwrap();
            worst = worst.max(c);
        }
        assert!(worst < 0.2, "max |<f,g>| = {worst}");
    }

    #[test]
    fn product_scale_invariance() {
        let lat = lat16();
        let spec = DyadicBlockSpec::new(2, 2);
        let b1 = make_block(&spec, &lat, 5, 0).unwrap();
        let b2 = make_block(&spec, &lat, 5, 1).unwrap();
        let base = b1.product_l2(&b2, None);
        let mut s1 = b1.clone();
        let mut s2 = b2.clone();
        for c in s1.coeffs.values_mut() {
            *c *= 3.0;
        }
        for c in s2.coeffs.values_mut() {
            *c *= 3.0;
        }
        assert!((s1.product_l2(&s2, None) - 9.0 * base).abs() < 1e-12 * base);
    }

    #[test]
    fn sparse_product_matches_direct_grid_product() {
        // Materialize two small blocks on a physical grid and compare the
        // product L2 norm against the sparse convolution.
        let lat = lat16();
        let spec = DyadicBlockSpec::new(2, 1);
        let b1 = make_block(&spec, &lat, 11, 0).unwrap();
        let b2 = make_block(&spec, &lat, 11, 1).unwrap();
        let sparse = b1.product_l2(&b2, None);
        // physical evaluation on an oversampled grid (64^3 >= 4x the max
        // frequency, so |u1 u2|^2 is integrated exactly)
        let m = 64usize;
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let eval = |f: &SparseField, t: f64, x: f64, y: f64| -> f64 {
            f.coeffs
                .iter()
                .map(|(p, c)| {
                    let phase = t * p[0] as f64 + x * p[1] as f64 + y * p[2] as f64;
                    (c * Complex64::from_polar(1.0, phase)).re
                })
                .sum()
        };
        let mut sum = 0.0;
        for it in 0..m {
            for ix in 0..m {
                for iy in 0..m {
                    let (t, x, y) = (it as f64 * step, ix as f64 * step, iy as f64 * step);
                    let v = eval(&b1, t, x, y) * eval(&b2, t, x, y);
                    sum += v * v;
                }
            }
        }
        let direct = (sum * (2.0 * std::f64::consts::PI).powi(3) / (m * m * m) as f64).sqrt();
        assert!(
            (sparse - direct).abs() < 1e-10 * direct.max(1e-300),
            "sparse {sparse} vs direct {direct}"
        );
    }

    #[test]
    fn measure2_precondition_enforced() {
        let lat = lat16();
        let a = DyadicBlockSpec::new(2, 2);
        let b = DyadicBlockSpec::new(2, 2);
        assert!(matches!(
            block_product_ratio(&a, &b, ProductMode::Measure2, 4, &lat, 1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn measure3_needs_sign_set() {
        let lat = lat16();
        let a = DyadicBlockSpec::new(2, 2);
        let b = DyadicBlockSpec::new(2, 2);
        assert!(matches!(
            block_product_ratio(&a, &b, ProductMode::Measure3, 4, &lat, 1),
            Err(Error::PreconditionViolated(_))
        ));
        let a = a.with_sign_set(SignSet::S1);
        let r = block_product_ratio(&a, &b, ProductMode::Measure3, 4, &lat, 1).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn trials_and_exhaustive_agree_to_factor_two() {
        let lat = lat16();
        let a = DyadicBlockSpec::new(2, 2);
        let b = DyadicBlockSpec::new(2, 2);
        let trials = block_product_ratio(&a, &b, ProductMode::Measure, 50, &lat, 9).unwrap();
        let exhaustive = exhaustive_basis_ratio(&a, &b, ProductMode::Measure, &lat).unwrap();
        let ratio = trials / exhaustive;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "trials {trials} vs exhaustive {exhaustive}"
        );
    }
}
