//! Monte Carlo study of the dyadic coupling against an independent baseline.
//!
//! Replications run in parallel; each draws from its own stream keyed by
//! (seed, replication), and results are reduced in replication order, so the
//! output does not depend on the thread count.

use rayon::prelude::*;

use super::area::sample_gaussian_area;
use super::dyadic::{dyadic_coupling, dyadic_deviations, max_partial_sum_deviation, CouplingMode, DyadicDeviation};
use super::rng::{stream_rng, Purpose};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub m: u32,
    pub d: usize,
    pub mode: CouplingMode,
    pub replications: usize,
    pub seed: u64,
    /// Bridge sub-steps of the reference area sampler.
    pub substeps: usize,
    /// Keep every per-set deviation (large: `replications * (2N - 1)` rows).
    pub keep_raw: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { m: 10, d: 2, mode: CouplingMode::Exact2d, replications: 1000, seed: 0, substeps: 64, keep_raw: false }
    }
}

/// L^{5/2} norms of dyadic deviations at one scale, averaged over the sets of that scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSummary {
    pub scale: u32,
    pub coupled: f64,
    pub coupled_se: f64,
    pub baseline: f64,
    pub baseline_se: f64,
    /// Mean of the paired difference `|dev_coupled|^{5/2} - |dev_baseline|^{5/2}`.
    pub paired_diff: f64,
    pub paired_diff_se: f64,
}

#[derive(Clone, Debug)]
pub struct CouplingStudy {
    pub config: StudyConfig,
    pub h: f64,
    pub scales: Vec<ScaleSummary>,
    /// L^{5/2} norm of `max_j |partial sum of (A - B)|`.
    pub max_partial: f64,
    pub max_partial_se: f64,
    pub baseline_max_partial: f64,
    pub baseline_max_partial_se: f64,
    /// `(replication, deviations)` when `keep_raw` is set.
    pub raw: Vec<(usize, Vec<DyadicDeviation>)>,
}

impl CouplingStudy {
    pub fn scale(&self, n: u32) -> Option<&ScaleSummary> {
        self.scales.iter().find(|s| s.scale == n)
    }

    /// Ratio of the coupled L^{5/2} deviation between two scales.
    pub fn growth(&self, from: u32, to: u32) -> Option<f64> {
        Some(self.scale(to)?.coupled / self.scale(from)?.coupled)
    }

    pub fn baseline_growth(&self, from: u32, to: u32) -> Option<f64> {
        Some(self.scale(to)?.baseline / self.scale(from)?.baseline)
    }
}

const P: f64 = 2.5;

struct Rep {
    coupled: Vec<f64>,
    baseline: Vec<f64>,
    max_partial: f64,
    baseline_max_partial: f64,
    raw: Option<Vec<DyadicDeviation>>,
}

fn per_scale_means(devs: &[DyadicDeviation], m: u32) -> Vec<f64> {
    let mut sums = vec![0.0; m as usize + 1];
    for dv in devs {
        sums[dv.set.scale as usize] += dv.deviation.powf(P);
    }
    sums.iter().enumerate().map(|(n, s)| s / (1usize << (m as usize - n)) as f64).collect()
}

fn replicate(cfg: &StudyConfig, r: usize) -> Result<Rep> {
    let mut rng = stream_rng(cfg.seed, Purpose::Brownian, r as u64);
    let drv = dyadic_coupling::<f64, _>(cfg.m, cfg.d, cfg.mode, cfg.substeps, &mut rng)?;
    let mut brng = stream_rng(cfg.seed, Purpose::Baseline, r as u64);
    let indep = sample_gaussian_area(&drv.w, &mut brng);
    let base = dyadic_deviations(&drv.a, &indep)?;
    Ok(Rep {
        coupled: per_scale_means(&drv.diagnostics, cfg.m),
        baseline: per_scale_means(&base, cfg.m),
        max_partial: max_partial_sum_deviation(&drv.a, &drv.b).powf(P),
        baseline_max_partial: max_partial_sum_deviation(&drv.a, &indep).powf(P),
        raw: cfg.keep_raw.then_some(drv.diagnostics),
    })
}

/// Mean and standard error, accumulated in order with compensation.
fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = neumaier(v.iter().copied()) / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = neumaier(v.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn neumaier(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// `(E X)^{1/p}` with a delta-method standard error.
fn norm_of((mean, se): (f64, f64)) -> (f64, f64) {
    let norm = mean.powf(1.0 / P);
    (norm, norm / (P * mean) * se)
}

pub fn coupling_study(cfg: &StudyConfig) -> Result<CouplingStudy> {
    if cfg.replications == 0 {
        return Err(Error::InvalidParameter("replications must be positive".into()));
    }
    let reps: Vec<Rep> = (0..cfg.replications).into_par_iter().map(|r| replicate(cfg, r)).collect::<Result<_>>()?;
    let scales = (0..=cfg.m)
        .map(|n| {
            let i = n as usize;
            let (coupled, coupled_se) = norm_of(mean_se(reps.iter().map(|r| r.coupled[i])));
            let (baseline, baseline_se) = norm_of(mean_se(reps.iter().map(|r| r.baseline[i])));
            let (paired_diff, paired_diff_se) = mean_se(reps.iter().map(|r| r.coupled[i] - r.baseline[i]));
            ScaleSummary { scale: n, coupled, coupled_se, baseline, baseline_se, paired_diff, paired_diff_se }
        })
        .collect();
    let (max_partial, max_partial_se) = norm_of(mean_se(reps.iter().map(|r| r.max_partial)));
    let (baseline_max_partial, baseline_max_partial_se) = norm_of(mean_se(reps.iter().map(|r| r.baseline_max_partial)));
    let raw = reps.into_iter().enumerate().filter_map(|(i, r)| r.raw.map(|d| (i, d))).collect();
    Ok(CouplingStudy {
        config: cfg.clone(),
        h: 1.0 / (1u64 << cfg.m) as f64,
        scales,
        max_partial,
        max_partial_se,
        baseline_max_partial,
        baseline_max_partial_se,
        raw,
    })
}
