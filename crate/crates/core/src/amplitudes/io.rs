//! Binary grid files and CSV density export.
//!
//! Layout, all little-endian:
//!
//! | field | type |
//! |-------|------|
//! | N     | u64  |
//! | pmax  | f64  |
//! | two_s | u32  |
//! | m0    | f64  |
//! | η     | i32  |
//!
//! followed by (2s+1)·N³ complex samples stored as (re, im) f64 pairs in
//! the order [component][ix][iy][iz] (z fastest).

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{DensityField, IntrinsicParity, MomentumAmplitude, ParticleSpec};
use crate::error::{Error, Result};
use crate::fourier::GridSpec;
use crate::spin::SpinValue;

const HEADER_LEN: usize = 8 + 8 + 4 + 8 + 4;

/// Write a grid amplitude (scale folded into the samples).
pub fn write_grid<W: Write>(psi: &MomentumAmplitude, mut w: W) -> Result<()> {
    let spec = psi
        .grid_spec()
        .filter(|_| psi.is_grid())
        .ok_or_else(|| Error::usage("only grid amplitudes can be written; sample it first"))?;
    let comps = psi.grid_components().expect("grid carrier");
    let part = psi.particle();
    let mut buf = Vec::with_capacity(HEADER_LEN + comps.len() * spec.len() * 16);
    buf.extend_from_slice(&(spec.n() as u64).to_le_bytes());
    buf.extend_from_slice(&spec.pmax().to_le_bytes());
    buf.extend_from_slice(&part.spin().two_s().to_le_bytes());
    buf.extend_from_slice(&part.m0().to_le_bytes());
    buf.extend_from_slice(&i32::from(part.eta()).to_le_bytes());
    for c in &comps {
        for z in c {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn take<const K: usize>(bytes: &[u8], at: &mut usize) -> Result<[u8; K]> {
    let s = bytes
        .get(*at..*at + K)
        .ok_or_else(|| Error::Data("truncated grid file".into()))?;
    *at += K;
    Ok(s.try_into().unwrap())
}

/// Read a grid amplitude; the usual construction checks apply.
pub fn read_grid<R: Read>(mut r: R) -> Result<MomentumAmplitude> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut at = 0;
    let n = u64::from_le_bytes(take(&bytes, &mut at)?);
    let pmax = f64::from_le_bytes(take(&bytes, &mut at)?);
    let two_s = u32::from_le_bytes(take(&bytes, &mut at)?);
    let m0 = f64::from_le_bytes(take(&bytes, &mut at)?);
    let eta = i32::from_le_bytes(take(&bytes, &mut at)?);
    let n = usize::try_from(n).map_err(|_| Error::Data("grid size overflow".into()))?;
    if n > 4096 {
        return Err(Error::Data(format!("implausible grid size {n}")));
    }
    let spec = GridSpec::new(n, pmax).map_err(|e| Error::Data(e.to_string()))?;
    let particle = ParticleSpec::new(m0, SpinValue::new(two_s), IntrinsicParity::try_from(eta)?)
        .map_err(|e| Error::Data(e.to_string()))?;
    let dim = particle.spin().dim();
    let expected = HEADER_LEN + dim * spec.len() * 16;
    if bytes.len() != expected {
        return Err(Error::Data(format!("grid file has {} bytes, expected {expected}", bytes.len())));
    }
    let mut comps = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut c = Vec::with_capacity(spec.len());
        for _ in 0..spec.len() {
            let re = f64::from_le_bytes(take(&bytes, &mut at)?);
            let im = f64::from_le_bytes(take(&bytes, &mut at)?);
            c.push(Complex64::new(re, im));
        }
        comps.push(c);
    }
    MomentumAmplitude::from_grid(particle, spec, comps)
}

/// CSV of a density along a line through the origin: `s,px,py,pz,value`,
/// `count` points from −extent to +extent along `dir` (unit vector).
pub fn write_density_line_csv<W: Write>(
    density: &DensityField,
    dir: nalgebra::Vector3<f64>,
    extent: f64,
    count: usize,
    mut w: W,
) -> Result<()> {
    let dir = dir
        .try_normalize(0.0)
        .ok_or_else(|| Error::domain("direction must be non-zero"))?;
    writeln!(w, "s,px,py,pz,value")?;
    for k in 0..count {
        let s = if count > 1 { -extent + 2.0 * extent * k as f64 / (count - 1) as f64 } else { 0.0 };
        let p = dir * s;
        let v = density.at(&p)?;
        writeln!(w, "{s:.16e},{:.16e},{:.16e},{:.16e},{v:.16e}", p.x, p.y, p.z)?;
    }
    Ok(())
}

/// CSV of a grid density at every grid point: `px,py,pz,value`.
pub fn write_density_grid_csv<W: Write>(density: &DensityField, spec: &GridSpec, mut w: W) -> Result<()> {
    let vals = density
        .grid_values()
        .ok_or_else(|| Error::usage("density is not on a grid"))?;
    writeln!(w, "px,py,pz,value")?;
    for (i, v) in vals.iter().enumerate() {
        let p = spec.momentum(i);
        writeln!(w, "{:.16e},{:.16e},{:.16e},{v:.16e}", p.x, p.y, p.z)?;
    }
    Ok(())
}
