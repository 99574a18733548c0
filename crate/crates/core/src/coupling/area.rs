//! Levy-area arrays, the bridge-decomposition reference sampler and the
//! Gaussian substitute `B_kl = z_k W_l - z_l W_k + lambda_kl`.

use rand::Rng;
use rand_distr::StandardNormal;

use super::BrownianBlocks;
use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{pair_index, pairs};

/// Antisymmetric area coordinates per block, pairs k < l in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaBlocks<T> {
    n: usize,
    d: usize,
    a: Vec<T>,
}

pub fn n_pairs(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

impl<T: Scalar> AreaBlocks<T> {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, a: vec![T::zero(); n * n_pairs(d)] }
    }

    pub fn from_values(n: usize, d: usize, a: Vec<T>) -> Result<Self> {
        if a.len() != n * n_pairs(d) {
            return Err(dim_mismatch("area buffer", n * n_pairs(d), a.len()));
        }
        Ok(Self { n, d, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block(&self, j: usize) -> &[T] {
        let p = n_pairs(self.d);
        &self.a[j * p..(j + 1) * p]
    }

    pub fn block_mut(&mut self, j: usize) -> &mut [T] {
        let p = n_pairs(self.d);
        &mut self.a[j * p..(j + 1) * p]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.a
    }

    /// `A^(j)_kl` for any k, l (antisymmetric, zero on the diagonal).
    pub fn get(&self, j: usize, k: usize, l: usize) -> T {
        use std::cmp::Ordering::*;
        match k.cmp(&l) {
            Equal => T::zero(),
            Less => self.block(j)[pair_index(self.d, k, l)],
            Greater => -self.block(j)[pair_index(self.d, l, k)],
        }
    }

    fn check(&self, w: &BrownianBlocks<T>) -> Result<()> {
        if (w.n(), w.d()) != (self.n, self.d) {
            return Err(dim_mismatch("(N, d) of W and areas", format!("({}, {})", self.n, self.d), format!("({}, {})", w.n(), w.d())));
        }
        Ok(())
    }

    /// Areas of merged blocks via Chen: `A_ac = A_ab + A_bc + 1/2 (W_ab,k W_bc,l - W_ab,l W_bc,k)`.
    pub fn coarsen(&self, w: &BrownianBlocks<T>, factor: usize) -> Result<Self> {
        self.check(w)?;
        if factor == 0 || self.n % factor != 0 {
            return Err(Error::InvalidParameter(format!("cannot coarsen {} blocks by {factor}", self.n)));
        }
        let (d, p) = (self.d, n_pairs(self.d));
        let half = T::of(0.5);
        let mut out = Self::zeros(self.n / factor, d);
        for c in 0..out.n {
            let mut acc_w = vec![T::zero(); d];
            let mut acc_a = vec![T::zero(); p];
            for j in c * factor..(c + 1) * factor {
                let wj = w.block(j);
                for (i, (k, l)) in pairs(d).enumerate() {
                    acc_a[i] += self.block(j)[i] + half * (acc_w[k] * wj[l] - acc_w[l] * wj[k]);
                }
                acc_w.iter_mut().zip(wj).for_each(|(a, &x)| *a += x);
            }
            out.block_mut(c).copy_from_slice(&acc_a);
        }
        Ok(out)
    }
}

/// Parts of the bridge decomposition `A_kl = zeta_k W_l - zeta_l W_k + K_kl`.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaParts<T> {
    /// `zeta^(j)_k = h^{1/2} int_0^1 b_k(s) ds`, block-major (N x d).
    pub zeta: Vec<T>,
    /// `K^(j)_kl = h int_0^1 (b_k db_l - b_l db_k)/2`, block-major (N x pairs).
    pub k: AreaBlocks<T>,
}

impl<T: Scalar> AreaParts<T> {
    /// Parts of merged blocks, from the fine parts and the fine increments.
    pub fn coarsen(&self, w: &BrownianBlocks<T>, areas: &AreaBlocks<T>, factor: usize) -> Result<Self> {
        let cw = w.coarsen(factor)?;
        let ca = areas.coarsen(w, factor)?;
        let (d, hf, hc) = (w.d(), w.h(), cw.h());
        let half = T::of(0.5);
        let mut zeta = vec![T::zero(); cw.n() * d];
        for c in 0..cw.n() {
            for k in 0..d {
                // int_0^H W_k dt over the merged block, W(0) = 0
                let (mut pos, mut integral) = (T::zero(), T::zero());
                for j in c * factor..(c + 1) * factor {
                    let wj = w.block(j)[k];
                    integral += hf * (pos + half * wj) + hf * self.zeta[j * d + k];
                    pos += wj;
                }
                zeta[c * d + k] = (integral - half * hc * cw.block(c)[k]) / hc;
            }
        }
        let mut kk = ca.clone();
        for c in 0..cw.n() {
            let wc = cw.block(c);
            for (i, (k, l)) in pairs(d).enumerate() {
                kk.block_mut(c)[i] -= zeta[c * d + k] * wc[l] - zeta[c * d + l] * wc[k];
            }
        }
        Ok(Self { zeta, k: kk })
    }
}

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Reference Levy areas given W, by the bridge decomposition on `m` sub-steps.
///
/// Each block's bridge is drawn at `m + 1` points; the exact Gaussian integrals
/// of the sub-bridges are added to `zeta`, their cross terms and (Gaussian)
/// sub-areas to K, so all second moments are exact for every `m`.
pub fn sample_area_reference<T: Scalar, R: Rng + ?Sized>(
    w: &BrownianBlocks<T>,
    m: usize,
    rng: &mut R,
) -> Result<AreaBlocks<T>> {
    Ok(sample_area_reference_parts(w, m, rng)?.0)
}

pub fn sample_area_reference_parts<T: Scalar, R: Rng + ?Sized>(
    w: &BrownianBlocks<T>,
    m: usize,
    rng: &mut R,
) -> Result<(AreaBlocks<T>, AreaParts<T>)> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("bridge sub-steps must be >= 2, got {m}")));
    }
    let (n, d) = (w.n(), w.d());
    let h = w.h().f64();
    let sh = h.sqrt();
    let mf = m as f64;
    let step_sd = (1.0 / mf).sqrt();
    let sub_int_sd = (mf.powi(-3) / 12.0).sqrt();
    let sub_area_sd = (mf.powi(-2) / 12.0).sqrt();
    let mut areas = AreaBlocks::zeros(n, d);
    let mut zeta = vec![T::zero(); n * d];
    let mut kk = AreaBlocks::zeros(n, d);
    // bridge values b[k][i], i = 0..=m, and sub-bridge integrals
    let mut b = vec![vec![0.0f64; m + 1]; d];
    let mut sub = vec![vec![0.0f64; m]; d];
    for j in 0..n {
        for k in 0..d {
            let bk = &mut b[k];
            for i in 0..m {
                bk[i + 1] = bk[i] + step_sd * gauss(rng);
            }
            let end = bk[m];
            for (i, v) in bk.iter_mut().enumerate() {
                *v -= end * i as f64 / mf;
            }
            for s in sub[k].iter_mut() {
                *s = sub_int_sd * gauss(rng);
            }
        }
        let wj = w.block(j);
        for k in 0..d {
            let bk = &b[k];
            let trap: f64 = (0..m).map(|i| 0.5 * (bk[i] + bk[i + 1]) / mf).sum::<f64>();
            let z = sh * (trap + sub[k].iter().sum::<f64>());
            zeta[j * d + k] = T::of(z);
        }
        for (pi, (k, l)) in pairs(d).enumerate() {
            let (bk, bl) = (&b[k], &b[l]);
            let mut a = 0.0;
            for i in 0..m {
                let (dk, dl) = (bk[i + 1] - bk[i], bl[i + 1] - bl[i]);
                a += 0.5 * (bk[i] * dl - bl[i] * dk);
                a += mf * (dl * sub[k][i] - dk * sub[l][i]);
                a += sub_area_sd * gauss(rng);
            }
            let kv = h * a;
            kk.block_mut(j)[pi] = T::of(kv);
            let (zk, zl) = (zeta[j * d + k].f64(), zeta[j * d + l].f64());
            areas.block_mut(j)[pi] = T::of(zk * wj[l].f64() - zl * wj[k].f64() + kv);
        }
    }
    Ok((areas, AreaParts { zeta, k: kk }))
}

/// Parts of the Gaussian substitute: `z ~ N(0, h/12 I_d)`, `lambda ~ N(0, h^2/12)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParts<T> {
    pub z: Vec<T>,
    pub lambda: AreaBlocks<T>,
}

pub fn sample_gaussian_area<T: Scalar, R: Rng + ?Sized>(w: &BrownianBlocks<T>, rng: &mut R) -> AreaBlocks<T> {
    sample_gaussian_area_parts(w, rng).0
}

pub fn sample_gaussian_area_parts<T: Scalar, R: Rng + ?Sized>(
    w: &BrownianBlocks<T>,
    rng: &mut R,
) -> (AreaBlocks<T>, GaussianParts<T>) {
    let (n, d) = (w.n(), w.d());
    let h = w.h().f64();
    let zsd = (h / 12.0).sqrt();
    let lsd = h / 12f64.sqrt();
    let mut out = AreaBlocks::zeros(n, d);
    let mut z = vec![T::zero(); n * d];
    let mut lambda = AreaBlocks::zeros(n, d);
    for j in 0..n {
        let zj: Vec<f64> = (0..d).map(|_| zsd * gauss(rng)).collect();
        let wj = w.block(j);
        for (pi, (k, l)) in pairs(d).enumerate() {
            let lam = lsd * gauss(rng);
            lambda.block_mut(j)[pi] = T::of(lam);
            out.block_mut(j)[pi] = T::of(zj[k] * wj[l].f64() - zj[l] * wj[k].f64() + lam);
        }
        for (o, v) in z[j * d..(j + 1) * d].iter_mut().zip(zj) {
            *o = T::of(v);
        }
    }
    (out, GaussianParts { z, lambda })
}
