//! Pseudo-spectral simulator and frequency-space analysis toolkit for the
//! 2D Zakharov-Kuznetsov equation
//!
//! ```text
//!     u_t + d/dx (Laplace(u) + u^2) = 0,   u : R_t x R^2_{x,y} -> R
//! ```
//!
//! discretized on a large periodic box. The crate provides:
//!
//! - exact linear propagation and an integrating-factor RK4 solver with
//!   2/3-rule dealiasing ([`dynamics`]);
//! - mass, energy, and Sobolev-norm diagnostics ([`invariants`]);
//! - a Littlewood-Paley apparatus with smooth dyadic projectors ([`dyadic`]);
//! - discrete space-time `X^{s,b}` norms and the linear/Duhamel estimate
//!   probes ([`xsb`]);
//! - randomized verification machinery for the bilinear block-interaction
//!   bounds and lattice measure counting ([`bilinear`]);
//! - the quantitative norm-growth toolkit: existence-time formula,
//!   increment decomposition, the iteration-lemma certifier, and
//!   polynomial-envelope fitting ([`growth`]).

pub mod bilinear;
pub mod config;
pub mod dyadic;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod growth;
pub mod invariants;
pub mod report;
pub mod rng;
pub mod snapshot;
pub mod xsb;

pub use error::{Error, Result};
pub use field::RealField2D;
pub use grid::{aniso_bracket, aniso_modulus, bracket, omega, MultiIndex, Multiplier, SpectralGrid};
