//! Conditional-Gaussianity check for substitute areas.
//!
//! Given W_j, a Gaussian substitute on one pair is N(0, h/12 (W_k^2 + W_l^2) + h^2/12).
//! Standardized values from every block of every replication are tested
//! against N(0, 1) with a one-sample KS test.

use rayon::prelude::*;

use super::estimators::{ks_pvalue, ks_statistic, normal_cdf};
use crate::coupling::{dyadic_coupling, stream_rng, CouplingMode, Purpose};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalKs {
    pub statistic: f64,
    pub pvalue: f64,
    pub n: usize,
}

/// Standardized coupled B on pair (0, 1), block-major within replication order.
pub fn standardized_substitutes(
    mode: CouplingMode,
    m: u32,
    d: usize,
    replications: usize,
    seed: u64,
    substeps: usize,
) -> Result<Vec<f64>> {
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be positive".into()));
    }
    let per_rep: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, Purpose::Brownian, r as u64);
            let drv = dyadic_coupling::<f64, _>(m, d, mode, substeps, &mut rng)?;
            let h = drv.w.h();
            Ok((0..drv.w.n())
                .map(|j| {
                    let w = drv.w.block(j);
                    let var = h / 12.0 * (w[0] * w[0] + w[1] * w[1]) + h * h / 12.0;
                    drv.b.block(j)[0] / var.sqrt()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_rep.concat())
}

pub fn marginal_ks(mode: CouplingMode, m: u32, d: usize, replications: usize, seed: u64, substeps: usize) -> Result<MarginalKs> {
    let u = standardized_substitutes(mode, m, d, replications, seed, substeps)?;
    let statistic = ks_statistic(&u, normal_cdf)?;
    Ok(MarginalKs { statistic, pvalue: ks_pvalue(u.len(), statistic), n: u.len() })
}
