//! Strong-error convergence experiments over a family of step sizes.
//!
//! Each path samples one driver (W, A) on the finest grid; coarser grids use
//! Chen-coarsened increments of the same driver, so errors at different h are
//! paired. Paths run in parallel and are reduced in path order.

use rayon::prelude::*;

use super::benchmarks::{benchmark, Benchmark};
use super::estimators::{fit_slope, mean_stderr, quantile_w2_1d_se, ErrorSummary, Estimator, SlopeFit};
use crate::coupling::{
    couple_areas, sample_area_reference_parts, sample_brownian, sample_gaussian_area, stream_rng, AreaBlocks,
    AreaParts, BrownianBlocks, CouplingMode, Purpose,
};
use crate::error::{Error, Result};
use crate::sde::{
    davie_path, euler_path, gaussian_logode_path, logode_level1_path, logode_path, milstein_path, FlowConfig, Scheme,
    SchemePath,
};

/// How Gaussian substitutes B are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaCoupling {
    /// B = A.
    Oracle,
    /// Independent of A given W.
    Independent,
    /// Dyadically coupled to A.
    Dyadic(CouplingMode),
}

/// What each scheme is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// The benchmark's closed-form solution.
    Exact,
    /// Log-ODE with true areas on a grid `extra_levels` finer than the finest tested.
    FineLogOde { extra_levels: u32 },
    /// Another scheme on the same grid and driver.
    Scheme(Scheme),
}

#[derive(Clone, Debug)]
pub struct ConvergenceConfig {
    pub benchmark: String,
    pub schemes: Vec<Scheme>,
    pub reference: Reference,
    /// Grid levels m, with h = 2^-m.
    pub levels: Vec<u32>,
    pub paths: usize,
    pub seed: u64,
    pub area_substeps: usize,
    pub flow: FlowConfig,
    pub gaussian: AreaCoupling,
    pub estimators: Vec<Estimator>,
    /// Replace the benchmark drift by a zero Ito drift.
    pub zero_ito_drift: bool,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            benchmark: "smooth_2d".into(),
            schemes: vec![Scheme::Euler, Scheme::Milstein, Scheme::LogOde],
            reference: Reference::FineLogOde { extra_levels: 3 },
            levels: (4..=9).collect(),
            paths: 1000,
            seed: 0,
            area_substeps: 64,
            flow: FlowConfig::default(),
            gaussian: AreaCoupling::Independent,
            estimators: vec![Estimator::StrongMax],
            zero_ito_drift: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SlopeRow {
    pub scheme: Scheme,
    pub estimator: Estimator,
    pub fit: SlopeFit,
}

#[derive(Clone, Debug)]
pub struct ConvergenceResult {
    pub benchmark: String,
    pub rows: Vec<ErrorSummary>,
    pub slopes: Vec<SlopeRow>,
}

impl ConvergenceResult {
    pub fn slope(&self, scheme: Scheme, estimator: Estimator) -> Option<f64> {
        self.slopes.iter().find(|s| s.scheme == scheme && s.estimator == estimator).map(|s| s.fit.slope)
    }
}

struct Cell {
    max_sq: f64,
    sq_by_j: Vec<f64>,
    norm_a: f64,
    norm_b: f64,
}

fn sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn cell(a: &SchemePath<f64>, b: &SchemePath<f64>) -> Cell {
    let sq_by_j: Vec<f64> = a.states().zip(b.states()).map(|(x, y)| sq(x, y)).collect();
    Cell {
        max_sq: sq_by_j.iter().copied().fold(0.0, f64::max),
        sq_by_j,
        norm_a: norm(a.last()),
        norm_b: norm(b.last()),
    }
}

struct Level {
    w: BrownianBlocks<f64>,
    a: AreaBlocks<f64>,
    b: AreaBlocks<f64>,
}

fn run_scheme(bench: &Benchmark<f64>, s: Scheme, lv: &Level, flow: &FlowConfig) -> Result<SchemePath<f64>> {
    let (vf, x0) = (&bench.system, bench.x0.as_slice());
    match s {
        Scheme::Euler => euler_path(vf, x0, &lv.w),
        Scheme::Milstein => milstein_path(vf, x0, &lv.w, &lv.a),
        Scheme::Davie => davie_path(vf, x0, &lv.w, &lv.b),
        Scheme::LogOde => logode_path(vf, x0, &lv.w, &lv.a, flow),
        Scheme::GaussianLogOde => gaussian_logode_path(vf, x0, &lv.w, &lv.b, flow),
        Scheme::LogOdeLevel1 => logode_level1_path(vf, x0, &lv.w, flow),
        Scheme::Exact => bench
            .exact_path(&lv.w, &lv.a)
            .unwrap_or_else(|| Err(Error::InvalidParameter(format!("{} has no closed-form solution", bench.name)))),
    }
}

fn level_seed(seed: u64, m: u32) -> u64 {
    seed ^ (m as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn one_path(cfg: &ConvergenceConfig, bench: &Benchmark<f64>, fine: u32, p: usize) -> Result<Vec<Cell>> {
    let d = bench.system.d();
    let mut rng = stream_rng(cfg.seed, Purpose::Brownian, p as u64);
    let n = 1usize << fine;
    let w = sample_brownian(n, d, 1.0 / n as f64, &mut rng)?;
    let (a, parts) = sample_area_reference_parts(&w, cfg.area_substeps, &mut rng)?;
    let fine_ref = match cfg.reference {
        Reference::FineLogOde { .. } => Some(logode_path(&bench.system, &bench.x0, &w, &a, &cfg.flow)?),
        _ => None,
    };
    let mut out = Vec::with_capacity(cfg.levels.len() * cfg.schemes.len());
    for &m in &cfg.levels {
        let f = 1usize << (fine - m);
        let (wm, am, pm): (BrownianBlocks<f64>, AreaBlocks<f64>, AreaParts<f64>) =
            if f == 1 { (w.clone(), a.clone(), parts.clone()) } else { (w.coarsen(f)?, a.coarsen(&w, f)?, parts.coarsen(&w, &a, f)?) };
        let bm = if d < 2 {
            am.clone()
        } else {
            match cfg.gaussian {
                AreaCoupling::Oracle => am.clone(),
                AreaCoupling::Independent => {
                    let mut r = stream_rng(level_seed(cfg.seed, m), Purpose::GaussianArea, p as u64);
                    sample_gaussian_area(&wm, &mut r)
                }
                AreaCoupling::Dyadic(mode) => couple_areas(&wm, &am, Some(&pm), mode)?.0,
            }
        };
        let lv = Level { w: wm, a: am, b: bm };
        let reference = match (&cfg.reference, &fine_ref) {
            (Reference::FineLogOde { .. }, Some(r)) => r.subsample(1 << (fine - m))?,
            (Reference::Scheme(s), _) => run_scheme(bench, *s, &lv, &cfg.flow)?,
            _ => run_scheme(bench, Scheme::Exact, &lv, &cfg.flow)?,
        };
        for &s in &cfg.schemes {
            out.push(cell(&run_scheme(bench, s, &lv, &cfg.flow)?, &reference));
        }
    }
    Ok(out)
}

fn reference_name(r: &Reference) -> String {
    match r {
        Reference::Exact => "exact".into(),
        Reference::FineLogOde { extra_levels } => format!("logode-fine+{extra_levels}"),
        Reference::Scheme(s) => s.name().into(),
    }
}

pub fn convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceResult> {
    let mut bench = benchmark::<f64>(&cfg.benchmark)?;
    if cfg.zero_ito_drift {
        bench.system = bench.system.clone().with_ito_drift(std::sync::Arc::new(|_: &[f64], o: &mut [f64]| o.fill(0.0)));
    }
    if cfg.levels.is_empty() || cfg.schemes.is_empty() || cfg.estimators.is_empty() {
        return Err(Error::InvalidParameter("levels, schemes and estimators must be non-empty".into()));
    }
    if cfg.paths < 2 {
        return Err(Error::InvalidParameter("need at least two paths".into()));
    }
    let finest = *cfg.levels.iter().max().expect("non-empty");
    let fine = match cfg.reference {
        Reference::FineLogOde { extra_levels } => finest + extra_levels,
        _ => finest,
    };
    if fine > 20 {
        return Err(Error::InvalidParameter(format!("finest level {fine} is too large")));
    }
    if cfg.reference == Reference::Exact && !bench.has_exact() {
        return Err(Error::InvalidParameter(format!("{} has no closed-form solution", bench.name)));
    }
    let cells: Vec<Vec<Cell>> =
        (0..cfg.paths).into_par_iter().map(|p| one_path(cfg, &bench, fine, p)).collect::<Result<_>>()?;
    let against = reference_name(&cfg.reference);
    let mut rows = Vec::new();
    for (li, &m) in cfg.levels.iter().enumerate() {
        let h = (-(m as f64)).exp2();
        for (si, s) in cfg.schemes.iter().enumerate() {
            let idx = li * cfg.schemes.len() + si;
            let col = || cells.iter().map(move |c| &c[idx]);
            for &e in &cfg.estimators {
                let (value, stderr) = match e {
                    Estimator::StrongMax => root(mean_stderr(&col().map(|c| c.max_sq).collect::<Vec<_>>())),
                    Estimator::FixedTime => {
                        let len = cells[0][idx].sq_by_j.len();
                        (0..len)
                            .map(|j| root(mean_stderr(&col().map(|c| c.sq_by_j[j]).collect::<Vec<_>>())))
                            .fold((0.0, 0.0), |best, v| if v.0 > best.0 { v } else { best })
                    }
                    Estimator::TerminalNormW2 => {
                        let a: Vec<f64> = col().map(|c| c.norm_a).collect();
                        let b: Vec<f64> = col().map(|c| c.norm_b).collect();
                        quantile_w2_1d_se(&a, &b)?
                    }
                };
                rows.push(ErrorSummary { h, scheme: s.name().into(), against: against.clone(), estimator: e, value, stderr, n: cfg.paths });
            }
        }
    }
    let mut slopes = Vec::new();
    if cfg.levels.len() >= 2 {
        for s in &cfg.schemes {
            for &e in &cfg.estimators {
                let pts: Vec<&ErrorSummary> = rows.iter().filter(|r| r.scheme == s.name() && r.estimator == e).collect();
                let hs: Vec<f64> = pts.iter().map(|r| r.h).collect();
                let vs: Vec<f64> = pts.iter().map(|r| r.value).collect();
                if let Ok(fit) = fit_slope(&hs, &vs) {
                    slopes.push(SlopeRow { scheme: *s, estimator: e, fit });
                }
            }
        }
    }
    Ok(ConvergenceResult { benchmark: bench.name.into(), rows, slopes })
}

fn root((m, se): (f64, f64)) -> (f64, f64) {
    let v = m.sqrt();
    (v, if v > 0.0 { se / (2.0 * v) } else { 0.0 })
}
