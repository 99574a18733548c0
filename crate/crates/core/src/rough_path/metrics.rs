//! Grid-restricted p-variation, inhomogeneous distances and greedy partition counts.
//!
//! Every supremum over partitions runs over the block grid `{jh}`, optionally
//! refined by `GridSpec::refine` uniform points per block.

use super::PAPath;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::GroupElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PVarMode {
    /// Homogeneous norm of increments (of `X^{-1} Y` for two paths).
    Homogeneous,
    /// `|pi_k(X_{s,t} - Y_{s,t})|^{p/k}`; `Y = 1` for a single path.
    Level(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolderOrPVar {
    PVar,
    Holder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    /// Uniform points per block (1 = block grid only).
    pub refine: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { refine: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    HomogeneousPVar,
    LevelPVar(usize),
    InhomPVar,
    InhomHolder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMetricReport<T> {
    pub kind: MetricKind,
    pub value: T,
    /// Partition times attaining the value (the maximising pair for Hoelder).
    pub partition: Vec<T>,
    pub p: T,
    /// Level attaining the maximum for the inhomogeneous metrics.
    pub level: Option<usize>,
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    Ok(())
}

fn check_grid(g: GridSpec) -> Result<()> {
    if g.refine == 0 {
        return Err(Error::InvalidParameter("grid refinement must be >= 1".into()));
    }
    Ok(())
}

fn grid_times<T: Scalar>(path: &PAPath<T>, g: GridSpec) -> Vec<T> {
    let n = path.n_blocks() * g.refine;
    let step = path.h() / T::of_usize(g.refine);
    (0..=n).map(|i| if i == n { T::one() } else { step * T::of_usize(i) }).collect()
}

fn level_cost<T: Scalar>(x: &GroupElement<T>, y: Option<&GroupElement<T>>, k: usize) -> T {
    let xs = x.tensor().level_slice(k);
    match y {
        Some(y) => xs.iter().zip(y.tensor().level_slice(k)).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt(),
        None => x.tensor().level_norm(k),
    }
}

/// Visits every grid pair (a, b), a < b, with increments `X_{a,b}` (and `Y_{a,b}`), a ascending.
fn for_each_pair<T: Scalar>(
    xs: &[GroupElement<T>],
    ys: Option<&[GroupElement<T>]>,
    mut f: impl FnMut(usize, usize, &GroupElement<T>, Option<&GroupElement<T>>),
) {
    let npts = xs.len() + 1;
    let one = GroupElement::identity(xs[0].dim(), xs[0].level()).expect("valid shape");
    for a in 0..npts - 1 {
        let mut x = one.clone();
        let mut y = one.clone();
        for b in a + 1..npts {
            x = &x * &xs[b - 1];
            if let Some(ys) = ys {
                y = &y * &ys[b - 1];
            }
            f(a, b, &x, ys.map(|_| &y));
        }
    }
}

fn pair_cost<T: Scalar>(x: &GroupElement<T>, y: Option<&GroupElement<T>>, p: T, mode: PVarMode) -> T {
    match mode {
        PVarMode::Homogeneous => {
            let n = match y {
                Some(y) => (&x.inverse() * y).homogeneous_norm(),
                None => x.homogeneous_norm(),
            };
            n.powf(p)
        }
        PVarMode::Level(k) => level_cost(x, y, k).powf(p / T::of_usize(k)),
    }
}

/// Exact grid supremum by dynamic programming; returns (sum of costs, partition indices).
fn pvar_dp<T: Scalar>(
    xs: &[GroupElement<T>],
    ys: Option<&[GroupElement<T>]>,
    p: T,
    mode: PVarMode,
) -> (T, Vec<usize>) {
    let npts = xs.len() + 1;
    let mut best = vec![T::neg_infinity(); npts];
    let mut arg = vec![0usize; npts];
    best[0] = T::zero();
    for_each_pair(xs, ys, |a, b, x, y| {
        let v = best[a] + pair_cost(x, y, p, mode);
        if v > best[b] {
            best[b] = v;
            arg[b] = a;
        }
    });
    let mut part = vec![npts - 1];
    let mut i = npts - 1;
    while i > 0 {
        i = arg[i];
        part.push(i);
    }
    part.reverse();
    (best[npts - 1], part)
}

fn check_mode<T: Scalar>(path: &PAPath<T>, mode: PVarMode) -> Result<()> {
    if let PVarMode::Level(k) = mode {
        if k == 0 || k > path.level() {
            return Err(Error::InvalidParameter(format!("level {k} outside 1..={}", path.level())));
        }
    }
    Ok(())
}

fn finish<T: Scalar>(mode: PVarMode, sum: T, p: T) -> (MetricKind, T) {
    match mode {
        PVarMode::Homogeneous => (MetricKind::HomogeneousPVar, sum.powf(T::one() / p)),
        PVarMode::Level(k) => (MetricKind::LevelPVar(k), sum.powf(T::of_usize(k) / p)),
    }
}

/// Grid p-variation of a single path.
pub fn grid_p_variation<T: Scalar>(
    path: &PAPath<T>,
    p: T,
    mode: PVarMode,
    grid: GridSpec,
) -> Result<GridMetricReport<T>> {
    check_p(p)?;
    check_grid(grid)?;
    check_mode(path, mode)?;
    let xs = path.step_increments(grid.refine);
    let (sum, part) = pvar_dp(&xs, None, p, mode);
    let times = grid_times(path, grid);
    let (kind, value) = finish(mode, sum, p);
    let level = match mode {
        PVarMode::Level(k) => Some(k),
        PVarMode::Homogeneous => None,
    };
    Ok(GridMetricReport { kind, value, partition: part.iter().map(|&i| times[i]).collect(), p, level })
}

/// Grid p-variation distance between two paths on the same grid.
pub fn grid_p_variation_distance<T: Scalar>(
    a: &PAPath<T>,
    b: &PAPath<T>,
    p: T,
    mode: PVarMode,
    grid: GridSpec,
) -> Result<GridMetricReport<T>> {
    check_p(p)?;
    check_grid(grid)?;
    a.same_layout(b)?;
    check_mode(a, mode)?;
    let xs = a.step_increments(grid.refine);
    let ys = b.step_increments(grid.refine);
    let (sum, part) = pvar_dp(&xs, Some(&ys), p, mode);
    let times = grid_times(a, grid);
    let (kind, value) = finish(mode, sum, p);
    let level = match mode {
        PVarMode::Level(k) => Some(k),
        PVarMode::Homogeneous => None,
    };
    Ok(GridMetricReport { kind, value, partition: part.iter().map(|&i| times[i]).collect(), p, level })
}

/// Inhomogeneous distance: maximum over levels k of the per-level quantity.
pub fn inhom_distance<T: Scalar>(
    a: &PAPath<T>,
    b: &PAPath<T>,
    p: T,
    flavor: HolderOrPVar,
    grid: GridSpec,
) -> Result<GridMetricReport<T>> {
    check_p(p)?;
    check_grid(grid)?;
    a.same_layout(b)?;
    let times = grid_times(a, grid);
    match flavor {
        HolderOrPVar::PVar => {
            let mut out: Option<GridMetricReport<T>> = None;
            for k in 1..=a.level() {
                let r = grid_p_variation_distance(a, b, p, PVarMode::Level(k), grid)?;
                if out.as_ref().is_none_or(|o| r.value > o.value) {
                    out = Some(r);
                }
            }
            let mut r = out.expect("level >= 1");
            r.kind = MetricKind::InhomPVar;
            Ok(r)
        }
        HolderOrPVar::Holder => {
            let xs = a.step_increments(grid.refine);
            let ys = b.step_increments(grid.refine);
            let mut best = (T::zero(), 0usize, 0usize, 1usize);
            for_each_pair(&xs, Some(&ys), |i, j, x, y| {
                let dt = times[j] - times[i];
                for k in 1..=a.level() {
                    let v = level_cost(x, y, k) / dt.powf(T::of_usize(k) / p);
                    if v > best.0 {
                        best = (v, i, j, k);
                    }
                }
            });
            Ok(GridMetricReport {
                kind: MetricKind::InhomHolder,
                value: best.0,
                partition: vec![times[best.1], times[best.2]],
                p,
                level: Some(best.3),
            })
        }
    }
}

/// Number of greedy times `0 < tau_n < 1`, where `tau_{n+1}` is the first grid time u
/// with `|X|^p_{p-var;[tau_n,u]} >= alpha` (homogeneous grid p-variation).
pub fn greedy_count<T: Scalar>(path: &PAPath<T>, alpha: T, p: T, grid: GridSpec) -> Result<usize> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    check_p(p)?;
    check_grid(grid)?;
    let steps = path.step_increments(grid.refine);
    let last = steps.len();
    let one = GroupElement::identity(path.dim(), path.level())?;
    let mut count = 0usize;
    let mut start = 0usize;
    while start < last {
        // best[v - start]: p-variation^p on [start, v]; inc[v - start]: X_{v,u}
        let mut best = vec![T::zero()];
        let mut inc = vec![one.clone()];
        let mut hit = None;
        for u in start + 1..=last {
            let e = &steps[u - 1];
            for x in inc.iter_mut() {
                *x = &*x * e;
            }
            let bu = inc
                .iter()
                .zip(&best)
                .map(|(x, &b)| b + x.homogeneous_norm().powf(p))
                .fold(T::neg_infinity(), T::max);
            if bu >= alpha {
                hit = Some(u);
                break;
            }
            best.push(bu);
            inc.push(one.clone());
        }
        match hit {
            Some(u) if u < last => {
                count += 1;
                start = u;
            }
            _ => break,
        }
    }
    Ok(count)
}
