use std::io::{BufRead, Read, Write};
use std::sync::Arc;

use super::field::Field;
use super::tensor::build_grid;
use crate::error::{CsxError, Result};
use crate::kernel::FractionalOrder;
use crate::scalar::Real;

/// On-disk layout of a field dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    /// Header line `CSX n R Lambda s q Nx Nlambda`, then one value per line.
    Text,
    /// Magic `CSX1`, then little-endian `f64`: the seven header numbers and the values.
    Binary,
}

fn header<T: Real>(f: &Field<T>) -> [f64; 7] {
    let g = f.grid();
    [
        g.n() as f64,
        g.r().as_f64(),
        g.height().as_f64(),
        f.order().s().as_f64(),
        g.q().as_f64(),
        g.nx() as f64,
        g.nlambda() as f64,
    ]
}

pub fn write_field<T: Real, W: Write>(field: &Field<T>, format: DumpFormat, mut out: W) -> Result<()> {
    let h = header(field);
    match format {
        DumpFormat::Text => {
            writeln!(
                out,
                "CSX {} {:e} {:e} {:e} {:e} {} {}",
                h[0] as usize, h[1], h[2], h[3], h[4], h[5] as usize, h[6] as usize
            )?;
            for v in field.values() {
                writeln!(out, "{:.16e}", v.as_f64())?;
            }
        }
        DumpFormat::Binary => {
            out.write_all(b"CSX1")?;
            for x in h {
                out.write_all(&x.to_le_bytes())?;
            }
            for v in field.values() {
                out.write_all(&v.as_f64().to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> CsxError {
    CsxError::Format(msg.into())
}

fn build<T: Real>(h: [f64; 7], values: Vec<f64>) -> Result<Field<T>> {
    let count = |x: f64, what: &str| {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(bad(format!("{what} = {x} is not a count")))
        }
    };
    let grid = build_grid(
        count(h[0], "n")?,
        T::lit(h[1]),
        T::lit(h[2]),
        count(h[5], "Nx")?,
        count(h[6], "Nlambda")?,
        T::lit(h[4]),
    )?;
    let order = FractionalOrder::new(T::lit(h[3]))?;
    Field::new(Arc::new(grid), order, values.into_iter().map(T::lit).collect())
}

/// Reads either dump format, detected from the leading bytes.
pub fn read_field<T: Real, R: Read>(input: R) -> Result<Field<T>> {
    let mut input = std::io::BufReader::new(input);
    let peek = input.fill_buf()?;
    if peek.starts_with(b"CSX1") {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let body = &bytes[4..];
        if body.len() % 8 != 0 || body.len() < 56 {
            return Err(bad("binary dump length is not a whole number of f64 words"));
        }
        let words: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let mut h = [0.0; 7];
        h.copy_from_slice(&words[..7]);
        return build(h, words[7..].to_vec());
    }
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| bad("empty dump"))??;
    let mut parts = first.split_whitespace();
    if parts.next() != Some("CSX") {
        return Err(bad("missing CSX header"));
    }
    let nums: Vec<f64> = parts
        .map(|p| p.parse::<f64>().map_err(|e| bad(format!("header field '{p}': {e}"))))
        .collect::<Result<_>>()?;
    let h: [f64; 7] = nums
        .try_into()
        .map_err(|_| bad("header must hold 7 numbers: n R Lambda s q Nx Nlambda"))?;
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(t.parse::<f64>().map_err(|e| bad(format!("value '{t}': {e}")))?);
    }
    build(h, values)
}
