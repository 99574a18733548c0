//! CSV layout of a piecewise abelian path.
//!
//! ```text
//! # pa-path v1 dim=2 level=2 h=0.25 blocks=4
//! block,1,2,11,12,21,22
//! 0,0.31,-0.2,0,0.05,-0.05,0
//! ```
//! One row per block with the dense coefficients of levels 1..=n of the
//! log-increment; columns are word labels (1-based letters).

use std::io::{BufRead, Write};

use super::PAPath;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{word_label, LieElement, TruncatedTensor};

const MAGIC: &str = "# pa-path v1";

pub fn write_csv<T: Scalar, W: Write>(path: &PAPath<T>, mut w: W) -> Result<()> {
    let (d, n) = (path.dim(), path.level());
    writeln!(w, "{MAGIC} dim={d} level={n} h={} blocks={}", path.h(), path.n_blocks())?;
    let mut header = vec!["block".to_string()];
    for k in 1..=n {
        header.extend((0..d.pow(k as u32)).map(|i| word_label(d, k, i)));
    }
    writeln!(w, "{}", header.join(","))?;
    for (j, b) in path.blocks().iter().enumerate() {
        let coeffs = &b.tensor().coeffs()[1..];
        let row: Vec<String> = std::iter::once(j.to_string()).chain(coeffs.iter().map(|c| c.to_string())).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn field(header: &str, key: &str) -> Result<String> {
    header
        .split_whitespace()
        .find_map(|t| t.strip_prefix(&format!("{key}=")))
        .map(str::to_string)
        .ok_or_else(|| Error::Parse(format!("header lacks {key}=")))
}

fn num<V: std::str::FromStr>(s: &str, what: &str) -> Result<V> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

/// Reads the layout written by [`write_csv`]; rows must be Lie elements.
pub fn read_csv<T: Scalar, R: BufRead>(r: R) -> Result<PAPath<T>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
    if !header.starts_with(MAGIC) {
        return Err(Error::Parse("missing pa-path header".into()));
    }
    let d: usize = num(&field(&header, "dim")?, "dim")?;
    let n: usize = num(&field(&header, "level")?, "level")?;
    let h: f64 = num(&field(&header, "h")?, "h")?;
    let nb: usize = num(&field(&header, "blocks")?, "blocks")?;
    let _columns = lines.next().ok_or_else(|| Error::Parse("missing column line".into()))??;
    let mut blocks = Vec::with_capacity(nb);
    for (j, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let idx: usize = num(cells.next().unwrap_or(""), "block index")?;
        if idx != j {
            return Err(Error::Parse(format!("block index {idx} out of order at row {j}")));
        }
        let mut levels = vec![vec![T::zero()]];
        let mut vals = cells.map(|c| num::<f64>(c, "coefficient").map(T::of));
        for k in 1..=n {
            let block = (0..d.pow(k as u32))
                .map(|_| vals.next().unwrap_or_else(|| Err(Error::Parse(format!("row {j} too short")))))
                .collect::<Result<Vec<T>>>()?;
            levels.push(block);
        }
        if vals.next().is_some() {
            return Err(Error::Parse(format!("row {j} too long")));
        }
        let t = TruncatedTensor::from_levels(d, levels)?;
        let tol = T::of(1e-12).max(T::epsilon() * T::of(64.0)) * (T::one() + t.max_abs());
        blocks.push(LieElement::from_tensor(t, tol)?);
    }
    if blocks.len() != nb {
        return Err(Error::Parse(format!("header says {nb} blocks, found {}", blocks.len())));
    }
    PAPath::build(blocks, T::of(h))
}
