//! Simulation configuration: a flat JSON document.

use crate::error::{Error, Result};
use crate::field::{cosine_mode, gaussian_at, RealField2D};
use crate::grid::SpectralGrid;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    /// Box lengths in units of pi (so the default 32 pi box is `32.0`).
    pub lx_pi: f64,
    pub ly_pi: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nx: 256,
            ny: 256,
            lx_pi: 32.0,
            ly_pi: 32.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Gaussian {
        amplitude: f64,
        width: f64,
        /// Center as box fractions; defaults to the middle.
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
    Modes {
        modes: Vec<ModeSpec>,
    },
    File {
        path: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub m1: i64,
    pub m2: i64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub grid: GridConfig,
    pub initial: InitialData,
    /// Fixed time step; mutually exclusive with `cfl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Adaptive CFL number in (0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    pub t_end: f64,
    /// Steps between snapshots/diagnostics rows.
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Sobolev indices tracked in the diagnostics (s >= 1).
    #[serde(default = "default_s_list")]
    pub s_list: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
}

fn default_snapshot_every() -> usize {
    10
}

fn default_s_list() -> Vec<u32> {
    vec![1, 2]
}

impl SimulationConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimulationConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.nx < 8 || g.nx % 2 != 0 || g.ny < 8 || g.ny % 2 != 0 {
            return Err(Error::Config("nx, ny must be even and >= 8".into()));
        }
        if !(g.lx_pi > 0.0 && g.ly_pi > 0.0) {
            return Err(Error::Config("box lengths must be positive".into()));
        }
        match (self.dt, self.cfl) {
            (Some(dt), None) if dt > 0.0 => {}
            (None, Some(c)) if c > 0.0 && c <= 1.0 => {}
            (None, None) => {}
            _ => {
                return Err(Error::Config(
                    "give exactly one of dt > 0 or cfl in (0, 1]".into(),
                ))
            }
        }
        if self.t_end < 0.0 {
            return Err(Error::Config("t_end must be >= 0".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be positive".into()));
        }
        if self.s_list.iter().any(|&s| s < 1) {
            return Err(Error::Config("s_list entries must be >= 1".into()));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Arc<SpectralGrid> {
        SpectralGrid::new(
            self.grid.nx,
            self.grid.ny,
            self.grid.lx_pi * std::f64::consts::PI,
            self.grid.ly_pi * std::f64::consts::PI,
        )
    }

    pub fn build_initial(&self, grid: &Arc<SpectralGrid>, config_dir: &Path) -> Result<RealField2D> {
        match &self.initial {
            InitialData::Gaussian {
                amplitude,
                width,
                center,
            } => {
                let c = center.unwrap_or([0.5, 0.5]);
                Ok(gaussian_at(
                    grid,
                    *amplitude,
                    *width,
                    c[0] * grid.lx(),
                    c[1] * grid.ly(),
                ))
            }
            InitialData::Modes { modes } => {
                let mut f = RealField2D::zeros(grid);
                for m in modes {
                    f = f.axpy(1.0, &cosine_mode(grid, m.m1, m.m2, m.amplitude));
                }
                Ok(f)
            }
            InitialData::File { path } => {
                let p = config_dir.join(path);
                crate::snapshot::read_snapshot_on(&p, grid)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SimulationConfig {
        SimulationConfig {
            grid: GridConfig {
                nx: 64,
                ny: 64,
                lx_pi: 8.0,
                ly_pi: 8.0,
            },
            initial: InitialData::Gaussian {
                amplitude: 1.0,
                width: 2.0,
                center: None,
            },
            dt: Some(1e-3),
            cfl: None,
            t_end: 1.0,
            snapshot_every: 10,
            s_list: vec![1, 2],
            seed: 42,
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = sample();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SimulationConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        let text2 = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let mut cfg = sample();
        cfg.dt = None;
        cfg.cfl = Some(1.5);
        assert!(cfg.validate().is_err());
        let mut cfg = sample();
        cfg.grid.nx = 13;
        assert!(cfg.validate().is_err());
        let mut cfg = sample();
        cfg.s_list = vec![0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"initial":{"type":"gaussian","amplitude":1.0,"width":2.0},"t_end":1.0,"bogus":3}"#;
        assert!(serde_json::from_str::<SimulationConfig>(text).is_err());
    }
}
