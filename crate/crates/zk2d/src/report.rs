//! CSV and JSON report writers.
//!
//! CSV values are written with Rust's shortest-round-trip float
//! formatting, so identical runs produce byte-identical files.

use crate::dyadic::ShellEnergy;
use crate::error::Result;
use crate::invariants::ConservedRecord;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub fn write_diagnostics_csv(path: &Path, rows: &[ConservedRecord]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,mass,energy,h1,hs,gn_ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.t, r.mass, r.energy, r.h1, r.hs, r.gn_ratio
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One trajectory-manifest row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRow {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub max_abs_u: f64,
    pub snapshot_path: String,
}

pub fn write_manifest_csv(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "step,t,dt,max_abs_u,snapshot_path")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.step, r.t, r.dt, r.max_abs_u, r.snapshot_path)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_shell_csv(path: &Path, rows: &[(f64, Vec<ShellEnergy>)]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,N,energy")?;
    for (t, shells) in rows {
        for s in shells {
            writeln!(w, "{},{},{}", t, s.n, s.energy)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One estimate-probe row (linear suite).
#[derive(Debug, Clone)]
pub struct EstimateRow {
    pub estimate_name: String,
    pub s: f64,
    pub b: f64,
    pub bprime: f64,
    pub t: f64,
    pub grid: String,
    pub ratio: f64,
}

pub fn write_estimates_csv(path: &Path, rows: &[EstimateRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "estimate_name,s,b,bprime,T,grid,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.estimate_name, r.s, r.b, r.bprime, r.t, r.grid, r.ratio
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One randomized-trial row (bilinear lab ledger).
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub estimate: String,
    pub params: String,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

pub fn write_trials_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "estimate,params,seed,lhs,rhs,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.estimate, r.params, r.seed, r.lhs, r.rhs, r.ratio
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-configuration summary of a randomized estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialSummary {
    pub estimate: String,
    pub params: String,
    pub trials: u64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// Relative change of the max under one grid refinement, when measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_delta: Option<f64>,
}

/// Constants of the certified iteration lemma, JSON-facing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma13Report {
    pub k1: f64,
    pub eps: f64,
    pub d: f64,
    pub n: u64,
    pub k2_log10: f64,
    pub verified_to_k: u64,
}

/// The growth-report JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub s: u32,
    /// Running max of the H^1 norm over the run.
    pub a: f64,
    pub t_window: f64,
    pub c0_measured: f64,
    pub beta_best: f64,
    pub envelope_c: f64,
    /// Whether `beta_best <= (s-1)/2` — informational only.
    pub beta_at_most_threshold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma13: Option<Lemma13Report>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| crate::error::Error::Config(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
