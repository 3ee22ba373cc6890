//! Error type shared by all modules.

use thiserror::Error;

/// Errors signalled by the numerical operations.
///
/// Ratio-valued probes report `Inapplicable` instead of dividing by zero;
/// everything else names the contract that was violated.
#[derive(Debug, Error)]
pub enum Error {
    /// A negative-power Fourier multiplier was applied to a field with
    /// nonzero content at a lattice point where the symbol vanishes.
    #[error("zero-mode singularity: negative power of a vanishing symbol at ({xi}, {mu})")]
    ZeroModeSingularity { xi: f64, mu: f64 },

    /// The solution amplitude exceeded the configured ceiling.
    #[error("blow-up suspected: max|u| = {max_abs} exceeds ceiling {ceiling} at t = {t}")]
    BlowUpSuspected { t: f64, max_abs: f64, ceiling: f64 },

    /// A Duhamel window extends past the sampled trajectory.
    #[error("window too short: requested T = {requested} but trajectory spans {available}")]
    WindowTooShort { requested: f64, available: f64 },

    /// A space-time field is not compactly supported inside its window.
    #[error("support leakage: boundary amplitude {boundary} exceeds {tolerance} of max {max_abs}")]
    SupportLeakage { boundary: f64, max_abs: f64, tolerance: f64 },

    /// A ratio probe has a vanishing denominator.
    #[error("inapplicable: {0}")]
    Inapplicable(&'static str),

    /// Parameters violate the stated range of an estimate.
    #[error("parameter range: {0}")]
    ParameterRange(String),

    /// A dyadic shell contains no lattice point on the configured grid.
    #[error("empty shell: no lattice point with N = {n}, L = {l}")]
    EmptyShell { n: u64, l: u64 },

    /// Lattice spacing too coarse for the requested shell geometry.
    #[error("resolution: spacing h = {h} exceeds min(N1,N2)/16 = {limit}")]
    Resolution { h: f64, limit: f64 },

    /// A shell-relation precondition of a block bound failed.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// Product derivatives exceed the dealiasing head-room.
    #[error("unresolved: spectral content outside the dealiased band ({fraction:.3e} of l2 mass)")]
    Unresolved { fraction: f64 },

    /// History too short for envelope fitting.
    #[error("insufficient span: t_max = {t_max} < 10 x first sample {t_first}")]
    InsufficientSpan { t_max: f64, t_first: f64 },

    /// Extended-precision arithmetic exceeded its representable range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Configuration or input file problem.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
