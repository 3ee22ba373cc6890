//! Binary field snapshot format.
//!
//! Layout: 32-byte header — magic `"ZK2D"`, version `u32`, `nx u32`,
//! `ny u32`, `box_length_x f64`, `box_length_y f64`, all little-endian —
//! followed by `nx * ny` `f64` little-endian values in row-major
//! (y-fastest) order.

use crate::error::{Error, Result};
use crate::field::RealField2D;
use crate::grid::SpectralGrid;
use ndarray::Array2;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

pub const MAGIC: &[u8; 4] = b"ZK2D";
pub const VERSION: u32 = 1;

pub fn write_snapshot(path: &Path, field: &RealField2D) -> Result<()> {
    let grid = field.grid();
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.nx() as u32).to_le_bytes())?;
    w.write_all(&(grid.ny() as u32).to_le_bytes())?;
    w.write_all(&grid.lx().to_le_bytes())?;
    w.write_all(&grid.ly().to_le_bytes())?;
    // Row-major with y fastest matches the in-memory (nx, ny) layout.
    for v in field.values().iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<RealField2D> {
    let file = std::fs::File::open(path)?;
    let mut r = std::io::BufReader::new(file);
    let mut header = [0u8; 32];
    r.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(Error::Config(format!("{}: bad magic", path.display())));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Config(format!(
            "{}: unsupported snapshot version {version}",
            path.display()
        )));
    }
    let nx = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let lx = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let ly = f64::from_le_bytes(header[24..32].try_into().unwrap());
    let mut buf = vec![0u8; nx * ny * 8];
    r.read_exact(&mut buf)?;
    let values: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let grid = SpectralGrid::new(nx, ny, lx, ly);
    Ok(RealField2D::from_values(
        &grid,
        Array2::from_shape_vec((nx, ny), values).expect("shape"),
    ))
}

/// Read a snapshot onto an existing grid, checking geometry agreement.
pub fn read_snapshot_on(path: &Path, grid: &Arc<SpectralGrid>) -> Result<RealField2D> {
    let f = read_snapshot(path)?;
    let g = f.grid();
    if g.nx() != grid.nx()
        || g.ny() != grid.ny()
        || (g.lx() - grid.lx()).abs() > 1e-12
        || (g.ly() - grid.ly()).abs() > 1e-12
    {
        return Err(Error::Config(format!(
            "{}: snapshot geometry {}x{} ({}, {}) does not match grid",
            path.display(),
            g.nx(),
            g.ny(),
            g.lx(),
            g.ly()
        )));
    }
    Ok(RealField2D::from_values(grid, f.values().clone()))
}
