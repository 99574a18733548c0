//! Normalised conditional covariance of dyadic area sums,
//! `H_E = 2^{-n} sum_{r in E} G_r G_r^t` with `G_r G_r^t = (I + M_r M_r^t)/12`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::area::n_pairs;
use super::BrownianBlocks;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::pairs;

/// Dyadic index set `E = [index 2^scale, (index + 1) 2^scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicSet {
    pub scale: u32,
    pub index: usize,
}

impl DyadicSet {
    pub fn len(&self) -> usize {
        1 << self.scale
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.index * self.len()..(self.index + 1) * self.len()
    }

    pub fn children(&self) -> Option<(DyadicSet, DyadicSet)> {
        (self.scale > 0).then(|| {
            let s = self.scale - 1;
            (DyadicSet { scale: s, index: 2 * self.index }, DyadicSet { scale: s, index: 2 * self.index + 1 })
        })
    }

    /// Checks `E` lies inside `0..n_blocks` with `n_blocks` a power of two.
    pub fn validate(&self, n_blocks: usize) -> Result<()> {
        if !n_blocks.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{n_blocks} blocks is not a power of two")));
        }
        if self.scale >= usize::BITS || self.range().end > n_blocks {
            return Err(Error::InvalidParameter(format!("dyadic set {self:?} outside {n_blocks} blocks")));
        }
        Ok(())
    }
}

/// `M_r`: the pairs x d matrix with `(M_r z)_kl = z_k w_l - z_l w_k`, `w = W^(r)/sqrt(h)`.
pub fn m_matrix(w: &[f64], sqrt_h: f64) -> DMatrix<f64> {
    let d = w.len();
    let mut m = DMatrix::zeros(n_pairs(d), d);
    for (i, (k, l)) in pairs(d).enumerate() {
        m[(i, k)] = w[l] / sqrt_h;
        m[(i, l)] = -w[k] / sqrt_h;
    }
    m
}

#[derive(Clone, Debug)]
pub struct BlockCovariance {
    pub set: DyadicSet,
    /// `H_E`, pairs x pairs.
    pub h_e: DMatrix<f64>,
    /// `G_r = [M_r, I] / sqrt(12)` for r in E.
    pub g: Vec<DMatrix<f64>>,
}

impl BlockCovariance {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.h_e.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Spectral norm of `H_E^{-1}`.
    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.min_eigenvalue()
    }
}

pub fn build_block_covariance<T: Scalar>(w: &BrownianBlocks<T>, set: DyadicSet) -> Result<BlockCovariance> {
    set.validate(w.n())?;
    let d = w.d();
    let p = n_pairs(d);
    if p == 0 {
        return Err(Error::InvalidParameter("block covariance needs d >= 2".into()));
    }
    let sh = w.h().f64().sqrt();
    let inv12 = 1.0 / 12f64.sqrt();
    let mut h_e = DMatrix::zeros(p, p);
    let mut g = Vec::with_capacity(set.len());
    for r in set.range() {
        let wr: Vec<f64> = w.block(r).iter().map(|x| x.f64()).collect();
        let m = m_matrix(&wr, sh);
        let mut gr = DMatrix::zeros(p, d + p);
        gr.view_mut((0, 0), (p, d)).copy_from(&(&m * inv12));
        gr.view_mut((0, d), (p, p)).fill_with_identity();
        gr.view_mut((0, d), (p, p)).scale_mut(inv12);
        h_e += &gr * gr.transpose();
        g.push(gr);
    }
    h_e /= set.len() as f64;
    Ok(BlockCovariance { set, h_e, g })
}
