//! Field files.
//!
//! Binary layout, little endian: `origin` (2 × f64), `extent` (2 × f64), `n`
//! (u64), component count (u64), then `n²` records of that many f64 in
//! row-major order (`i` fastest). Masked-out cells are stored as NaN.
//!
//! CSV layout: `x,y,c0,c1,...` with one line per cell, masked cells as `nan`.

use std::io::{Read, Write};

use anyhow::{bail, Context};
use eikonal_core::{Field2D, FieldValue, GridSpec, Mat2};

use crate::report::format_number;

/// Field values that flatten to a fixed number of f64 components.
pub trait Components: FieldValue {
    const COUNT: usize;
    fn write_to(&self, out: &mut Vec<f64>);
    fn read_from(c: &[f64]) -> Self;
}

impl Components for f64 {
    const COUNT: usize = 1;
    fn write_to(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
    fn read_from(c: &[f64]) -> Self {
        c[0]
    }
}

impl Components for [f64; 2] {
    const COUNT: usize = 2;
    fn write_to(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self);
    }
    fn read_from(c: &[f64]) -> Self {
        [c[0], c[1]]
    }
}

impl Components for Mat2 {
    const COUNT: usize = 4;
    fn write_to(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&[self[0][0], self[0][1], self[1][0], self[1][1]]);
    }
    fn read_from(c: &[f64]) -> Self {
        [[c[0], c[1]], [c[2], c[3]]]
    }
}

fn flatten<T: Components>(field: &Field2D<T>) -> Vec<f64> {
    let mut out = Vec::with_capacity(field.grid().len() * T::COUNT);
    for (v, &ok) in field.values().iter().zip(field.mask()) {
        if ok {
            v.write_to(&mut out);
        } else {
            out.extend(std::iter::repeat_n(f64::NAN, T::COUNT));
        }
    }
    out
}

pub fn write_binary<T: Components>(field: &Field2D<T>, mut w: impl Write) -> anyhow::Result<()> {
    let g = field.grid();
    let mut buf = Vec::with_capacity(48 + 8 * g.len() * T::COUNT);
    for v in [g.origin()[0], g.origin()[1], g.extent()[0], g.extent()[1]] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&(T::COUNT as u64).to_le_bytes());
    for v in flatten(field) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<T: Components>(mut r: impl Read) -> anyhow::Result<Field2D<T>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 48 {
        bail!("field file is shorter than its header");
    }
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let u = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let (origin, extent, n, count) = ([f(0), f(1)], [f(2), f(3)], u(4) as usize, u(5) as usize);
    if count != T::COUNT {
        bail!("field file has {count} components, expected {}", T::COUNT);
    }
    let expected = 48 + 8 * n * n * count;
    if bytes.len() != expected {
        bail!("field file has {} bytes, header implies {expected}", bytes.len());
    }
    let grid = GridSpec::new(origin, extent, n).context("invalid grid in field header")?;
    let mut values = Vec::with_capacity(n * n);
    let mut mask = Vec::with_capacity(n * n);
    for c in 0..n * n {
        let comps: Vec<f64> = (0..count).map(|k| f(6 + c * count + k)).collect();
        let ok = comps.iter().all(|v| !v.is_nan());
        mask.push(ok);
        values.push(if ok { T::read_from(&comps) } else { T::read_from(&vec![0.0; count]) });
    }
    Ok(Field2D::from_parts(grid, values, mask)?)
}

pub fn write_csv<T: Components>(field: &Field2D<T>, mut w: impl Write) -> anyhow::Result<()> {
    let g = *field.grid();
    let mut s = String::from("x,y");
    for k in 0..T::COUNT {
        s.push_str(&format!(",c{k}"));
    }
    s.push('\n');
    let flat = flatten(field);
    for j in 0..g.n() {
        for i in 0..g.n() {
            let c = g.center(i, j);
            s.push_str(&format_number(c[0]));
            s.push(',');
            s.push_str(&format_number(c[1]));
            let base = g.index(i, j) * T::COUNT;
            for v in &flat[base..base + T::COUNT] {
                s.push(',');
                s.push_str(&format_number(*v));
            }
            s.push('\n');
        }
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}
