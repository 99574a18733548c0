//! Dyadic (successive bisection) coupling of true Levy areas A with the
//! Gaussian substitutes B, sharing the same Brownian increments.
//!
//! Both couplers transport a sequence of summed areas onto a Gaussian sequence
//! with the same conditional covariance: the root total is mapped by its
//! quantile, and each split maps the conditional quantile of the left child
//! (given the parent) to the matching Gaussian conditional quantile.

use std::sync::Arc;

use rand::Rng;

use super::area::{n_pairs, sample_area_reference_parts, AreaBlocks, AreaParts};
use super::covariance::DyadicSet;
use super::levy_cf::{conditional_cdf, normal_quantile_pair, table, LevyTable, Part};
use super::{sample_brownian, BrownianBlocks};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::pairs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingMode {
    /// d = 2: quantile coupling of the exact conditional law of the area sums.
    Exact2d,
    /// Any d: keep the bridge integrals zeta as z, quantile-couple each
    /// coordinate of the bridge areas K to lambda. Joint law of B is approximate.
    ApproxNd,
}

impl std::str::FromStr for CouplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-2d" => Ok(Self::Exact2d),
            "approx-nd" => Ok(Self::ApproxNd),
            _ => Err(Error::InvalidParameter(format!("unknown coupling mode {s:?} (exact-2d | approx-nd)"))),
        }
    }
}

impl std::fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact2d => "exact-2d",
            Self::ApproxNd => "approx-nd",
        })
    }
}

/// `|gamma_E - lambda_E|` for one dyadic set, as the tensor norm of the level-2 difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicDeviation {
    pub set: DyadicSet,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct CoupledDriver<T> {
    pub w: BrownianBlocks<T>,
    pub a: AreaBlocks<T>,
    pub b: AreaBlocks<T>,
    pub mode: CouplingMode,
    pub diagnostics: Vec<DyadicDeviation>,
}

fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("dyadic coupling needs N = 2^m blocks, got {n}")));
    }
    Ok(n.trailing_zeros())
}

/// Sums over every dyadic set, `sums[n][i]` for scale n.
fn dyadic_sums(x: &[f64], m: u32) -> Vec<Vec<f64>> {
    let mut out = vec![x.to_vec()];
    for _ in 0..m {
        let prev = out.last().expect("non-empty");
        out.push(prev.chunks(2).map(|c| c[0] + c[1]).collect());
    }
    out
}

/// Maps area sums `a` (units of h) with block energies `s = |W|^2/h` to Gaussian
/// values with the same conditional variances `(1 + s_r)/12`.
fn couple_scalar(a: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let m = log2_exact(a.len())?;
    let gam = dyadic_sums(a, m);
    let ss = dyadic_sums(s, m);
    let tables: Vec<Arc<LevyTable>> = (0..=m).map(|n| table(1 << n)).collect();
    let part = |n: u32, i: usize| Part::with_table(tables[n as usize].clone(), 1 << n, ss[n as usize][i]);
    let root = part(m, 0);
    let (lo, up) = root.table.cdf_pair(root.theta, gam[m as usize][0] / root.sigma);
    let mut lam = vec![root.sigma * normal_quantile_pair(lo, up)];
    for n in (1..=m).rev() {
        let c = n - 1;
        let mut next = Vec::with_capacity(lam.len() * 2);
        for (i, &parent) in lam.iter().enumerate() {
            let (px, py) = (part(c, 2 * i), part(c, 2 * i + 1));
            let (lo, up) = conditional_cdf(&px, &py, gam[n as usize][i], gam[c as usize][2 * i]);
            let (vx, vy) = (px.sigma * px.sigma, py.sigma * py.sigma);
            let v = vx + vy;
            let left = vx / v * parent + (vx * vy / v).sqrt() * normal_quantile_pair(lo, up);
            next.push(left);
            next.push(parent - left);
        }
        lam = next;
    }
    Ok(lam)
}

/// Couples Gaussian substitutes B to the given true areas A (same W).
///
/// `Exact2d` uses only W and A; `ApproxNd` needs the bridge parts of A.
pub fn couple_areas<T: Scalar>(
    w: &BrownianBlocks<T>,
    a: &AreaBlocks<T>,
    parts: Option<&AreaParts<T>>,
    mode: CouplingMode,
) -> Result<(AreaBlocks<T>, Vec<DyadicDeviation>)> {
    let (n, d) = (w.n(), w.d());
    log2_exact(n)?;
    if d < 2 {
        return Err(Error::InvalidParameter("area coupling needs d >= 2".into()));
    }
    if (a.n(), a.d()) != (n, d) {
        return Err(Error::DimensionMismatch("areas and increments disagree on (N, d)".into()));
    }
    let h = w.h().f64();
    let mut b = AreaBlocks::zeros(n, d);
    match mode {
        CouplingMode::Exact2d => {
            if d != 2 {
                return Err(Error::InvalidParameter(format!("exact-2d coupling needs d = 2, got {d}")));
            }
            let av: Vec<f64> = (0..n).map(|j| a.block(j)[0].f64() / h).collect();
            let sv: Vec<f64> = (0..n).map(|j| w.block(j).iter().map(|x| x.f64() * x.f64()).sum::<f64>() / h).collect();
            for (j, l) in couple_scalar(&av, &sv)?.into_iter().enumerate() {
                b.block_mut(j)[0] = T::of(h * l);
            }
        }
        CouplingMode::ApproxNd => {
            let parts = parts.ok_or_else(|| Error::InvalidParameter("approx-nd coupling needs the bridge parts of A".into()))?;
            let zero = vec![0.0; n];
            for (pi, (k, l)) in pairs(d).enumerate() {
                let kv: Vec<f64> = (0..n).map(|j| parts.k.block(j)[pi].f64() / h).collect();
                let lam = couple_scalar(&kv, &zero)?;
                for j in 0..n {
                    let wj = w.block(j);
                    let (zk, zl) = (parts.zeta[j * d + k].f64(), parts.zeta[j * d + l].f64());
                    b.block_mut(j)[pi] = T::of(zk * wj[l].f64() - zl * wj[k].f64() + h * lam[j]);
                }
            }
        }
    }
    let diag = dyadic_deviations(a, &b)?;
    Ok((b, diag))
}

/// Samples W, reference A (bridge sub-steps `substeps`) and the coupled B on N = 2^m blocks.
pub fn dyadic_coupling<T: Scalar, R: Rng + ?Sized>(
    m: u32,
    d: usize,
    mode: CouplingMode,
    substeps: usize,
    rng: &mut R,
) -> Result<CoupledDriver<T>> {
    if m > 24 {
        return Err(Error::InvalidParameter(format!("m = {m} is too large")));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("area coupling needs d >= 2".into()));
    }
    if mode == CouplingMode::Exact2d && d != 2 {
        return Err(Error::InvalidParameter(format!("exact-2d coupling needs d = 2, got {d}")));
    }
    let n = 1usize << m;
    let w = sample_brownian(n, d, T::one() / T::of_usize(n), rng)?;
    let (a, parts) = sample_area_reference_parts(&w, substeps, rng)?;
    let (b, diagnostics) = couple_areas(&w, &a, Some(&parts), mode)?;
    Ok(CoupledDriver { w, a, b, mode, diagnostics })
}

fn pair_norm(x: &[f64]) -> f64 {
    // level-2 tensor norm of sum a_kl [e_k, e_l]
    std::f64::consts::SQRT_2 * x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Deviations `|sum_{r in E} (A_r - B_r)|` over every dyadic set, scale-major.
pub fn dyadic_deviations<T: Scalar>(a: &AreaBlocks<T>, b: &AreaBlocks<T>) -> Result<Vec<DyadicDeviation>> {
    let m = log2_exact(a.n())?;
    let p = n_pairs(a.d());
    let mut level: Vec<Vec<f64>> = (0..a.n())
        .map(|j| a.block(j).iter().zip(b.block(j)).map(|(x, y)| x.f64() - y.f64()).collect())
        .collect();
    let mut out = Vec::with_capacity(2 * a.n());
    for scale in 0..=m {
        out.extend(level.iter().enumerate().map(|(index, v)| DyadicDeviation { set: DyadicSet { scale, index }, deviation: pair_norm(v) }));
        level = level.chunks(2).filter(|c| c.len() == 2).map(|c| (0..p).map(|i| c[0][i] + c[1][i]).collect()).collect();
    }
    Ok(out)
}

/// `max_j |sum_{r<j} (A_r - B_r)|` over all partial sums.
pub fn max_partial_sum_deviation<T: Scalar>(a: &AreaBlocks<T>, b: &AreaBlocks<T>) -> f64 {
    let p = n_pairs(a.d());
    let mut acc = vec![0.0; p];
    let mut best: f64 = 0.0;
    for j in 0..a.n() {
        for (i, s) in acc.iter_mut().enumerate() {
            *s += a.block(j)[i].f64() - b.block(j)[i].f64();
        }
        best = best.max(pair_norm(&acc));
    }
    best
}
