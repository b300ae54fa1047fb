//! Binary field container (`.tfc`) and CSV export.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic       4 bytes  "TFC1"
//! dim         u32
//! n           u32      points per axis
//! kind        u32      0 = real, 1 = complex
//! components  u32
//! frames      u64
//! times       f64 x frames
//! payload     for each frame, for each component, N^dim values in row-major
//!             node order; real: one f64 per node, complex: (re, im) f64 pairs
//! ```

use std::io::{Read, Write};

use rustfft::num_complex::Complex64;

use super::field::ScalarField;
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"TFC1";

/// Decoded contents of a container.
#[derive(Clone, Debug, PartialEq)]
pub struct Container {
    pub grid: PeriodicGrid,
    pub complex: bool,
    pub times: Vec<f64>,
    /// `frames[f][c]` is component `c` of frame `f`.
    pub frames: Vec<Vec<ScalarField>>,
}

/// Write frames of equally many components. Real encoding is chosen when
/// every imaginary part is zero.
pub fn write_container<W: Write>(mut w: W, times: &[f64], frames: &[Vec<&ScalarField>]) -> Result<()> {
    if times.len() != frames.len() {
        return Err(Error::Format(format!("{} times for {} frames", times.len(), frames.len())));
    }
    let first = frames
        .first()
        .and_then(|f| f.first())
        .ok_or_else(|| Error::Format("container needs at least one field".into()))?;
    let grid = *first.grid();
    let components = frames[0].len();
    for frame in frames {
        if frame.len() != components {
            return Err(Error::Format("frames with differing component counts".into()));
        }
        for f in frame {
            first.check_same_grid(f)?;
        }
    }
    let complex = frames.iter().flatten().any(|f| !f.is_real());

    w.write_all(MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&(complex as u32).to_le_bytes())?;
    w.write_all(&(components as u32).to_le_bytes())?;
    w.write_all(&(frames.len() as u64).to_le_bytes())?;
    for t in times {
        w.write_all(&t.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(grid.node_count() * if complex { 16 } else { 8 });
    for frame in frames {
        for f in frame {
            buf.clear();
            for v in f.values() {
                buf.extend_from_slice(&v.re.to_le_bytes());
                if complex {
                    buf.extend_from_slice(&v.im.to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_container<R: Read>(mut r: R) -> Result<Container> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let grid = PeriodicGrid::new(dim, n)?;
    let complex = match read_u32(&mut r)? {
        0 => false,
        1 => true,
        k => return Err(Error::Format(format!("unknown value kind {k}"))),
    };
    let components = read_u32(&mut r)? as usize;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let nframes = u64::from_le_bytes(b) as usize;
    let times = (0..nframes).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    let mut frames = Vec::with_capacity(nframes);
    for _ in 0..nframes {
        let mut frame = Vec::with_capacity(components);
        for _ in 0..components {
            let mut vals = Vec::with_capacity(grid.node_count());
            for _ in 0..grid.node_count() {
                let re = read_f64(&mut r)?;
                let im = if complex { read_f64(&mut r)? } else { 0.0 };
                vals.push(Complex64::new(re, im));
            }
            frame.push(ScalarField::new(grid, vals)?);
        }
        frames.push(frame);
    }
    Ok(Container { grid, complex, times, frames })
}

/// CSV with columns `x,y,re,im`; `y` is 0 on one-dimensional grids.
pub fn write_field_csv<W: Write>(w: W, f: &ScalarField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "re", "im"])?;
    for (p, v) in f.grid().coords().zip(f.values()) {
        out.write_record([p[0].to_string(), p[1].to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
