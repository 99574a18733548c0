use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Scalar;

/// Brownian increments `W^(j)` on N blocks of length h, stored block-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianBlocks<T> {
    n: usize,
    d: usize,
    h: T,
    w: Vec<T>,
}

impl<T: Scalar> BrownianBlocks<T> {
    pub fn from_increments(d: usize, h: T, w: Vec<T>) -> Result<Self> {
        if d == 0 || w.is_empty() || w.len() % d != 0 {
            return Err(dim_mismatch("increment buffer", "a positive multiple of d", w.len()));
        }
        if !(h > T::zero()) {
            return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
        }
        Ok(Self { n: w.len() / d, d, h, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn block(&self, j: usize) -> &[T] {
        &self.w[j * self.d..(j + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.w
    }

    /// Sums of `factor` consecutive blocks.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.n % factor != 0 {
            return Err(Error::InvalidParameter(format!("cannot coarsen {} blocks by {factor}", self.n)));
        }
        let d = self.d;
        let mut w = vec![T::zero(); self.n / factor * d];
        for (j, chunk) in self.w.chunks(d * factor).enumerate() {
            for blk in chunk.chunks(d) {
                for (o, &x) in w[j * d..(j + 1) * d].iter_mut().zip(blk) {
                    *o += x;
                }
            }
        }
        Ok(Self { n: self.n / factor, d, h: self.h * T::of_usize(factor), w })
    }
}

/// i.i.d. `N(0, h I_d)` increments.
pub fn sample_brownian<T: Scalar, R: Rng + ?Sized>(n: usize, d: usize, h: T, rng: &mut R) -> Result<BrownianBlocks<T>> {
    if n == 0 || d == 0 || !(h > T::zero()) {
        return Err(Error::InvalidParameter(format!("need N, d, h > 0 (got {n}, {d}, {h})")));
    }
    let s = h.f64().sqrt();
    let w = (0..n * d).map(|_| T::of(s * rng.sample::<f64, _>(StandardNormal))).collect();
    Ok(BrownianBlocks { n, d, h, w })
}
