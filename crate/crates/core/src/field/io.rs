//! Flat little-endian snapshot format.
//!
//! Layout: `n: u64`, `r_max: f64`, `rep: u64` (0 physical, 1 frequency),
//! `t: f64`, then `2n` `f64` values with real and imaginary parts interleaved.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use super::{RadialField, RadialGrid, Rep};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const HEADER_BYTES: usize = 32;

pub fn write_snapshot<T: Real, W: Write>(w: &mut W, f: &RadialField<T>, t: T) -> std::io::Result<()> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(HEADER_BYTES + 16 * g.n());
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&g.r_max().to_f64_lossy().to_le_bytes());
    let rep: u64 = match f.rep() {
        Rep::Physical => 0,
        Rep::Frequency => 1,
    };
    buf.extend_from_slice(&rep.to_le_bytes());
    buf.extend_from_slice(&t.to_f64_lossy().to_le_bytes());
    for v in f.data() {
        buf.extend_from_slice(&v.re.to_f64_lossy().to_le_bytes());
        buf.extend_from_slice(&v.im.to_f64_lossy().to_le_bytes());
    }
    w.write_all(&buf)
}

fn word(b: &[u8], i: usize) -> [u8; 8] {
    b[8 * i..8 * i + 8].try_into().unwrap()
}

/// Reads a snapshot. Reuses `grid` when it matches the header, otherwise
/// builds a fresh one.
pub fn read_snapshot<T: Real, R: Read>(
    r: &mut R,
    grid: Option<&Arc<RadialGrid<T>>>,
) -> Result<(RadialField<T>, T)> {
    let mut head = [0u8; HEADER_BYTES];
    r.read_exact(&mut head).map_err(|e| Error::Format(e.to_string()))?;
    let n = u64::from_le_bytes(word(&head, 0)) as usize;
    let r_max = f64::from_le_bytes(word(&head, 1));
    let rep = match u64::from_le_bytes(word(&head, 2)) {
        0 => Rep::Physical,
        1 => Rep::Frequency,
        x => return Err(Error::Format(format!("bad rep flag {x}"))),
    };
    let t = f64::from_le_bytes(word(&head, 3));
    if n > 1 << 26 {
        return Err(Error::Format(format!("implausible n={n}")));
    }
    let mut body = vec![0u8; 16 * n];
    r.read_exact(&mut body).map_err(|e| Error::Format(e.to_string()))?;
    let data = (0..n)
        .map(|j| {
            Complex::new(
                T::lit(f64::from_le_bytes(word(&body, 2 * j))),
                T::lit(f64::from_le_bytes(word(&body, 2 * j + 1))),
            )
        })
        .collect();
    let g = match grid {
        Some(g) if g.n() == n && g.r_max().to_f64_lossy() == r_max => g.clone(),
        _ => RadialGrid::new(n, T::lit(r_max))?,
    };
    Ok((RadialField::from_data(&g, rep, data)?, T::lit(t)))
}
