//! Monte Carlo error estimators, slope fits and goodness-of-fit statistics.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sde::SchemePath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// `E[max_j |a_j - b_j|^2]^{1/2}`.
    StrongMax,
    /// `max_j E[|a_j - b_j|^2]^{1/2}`.
    FixedTime,
    /// Empirical 1-D W_2 between the laws of `|a_N|` and `|b_N|`.
    TerminalNormW2,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::StrongMax => "strong-max",
            Self::FixedTime => "fixed-time",
            Self::TerminalNormW2 => "terminal-norm-w2",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::StrongMax, Self::FixedTime, Self::TerminalNormW2]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSummary {
    pub h: f64,
    pub scheme: String,
    pub against: String,
    pub estimator: Estimator,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// Sample mean and its standard error (NaN for fewer than two samples).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `sqrt(mean)` with a delta-method standard error.
fn root_of((mean, se): (f64, f64)) -> (f64, f64) {
    let v = mean.sqrt();
    (v, if v > 0.0 { se / (2.0 * v) } else { 0.0 })
}

fn check_paired<T: Scalar>(a: &[SchemePath<T>], b: &[SchemePath<T>]) -> Result<()> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidParameter(format!("unpaired samples: {} vs {} paths", a.len(), b.len())));
    }
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() || x.q() != y.q() || (x.h() - y.h()).abs() > T::epsilon() * x.h() * T::of(16.0) {
            return Err(Error::InvalidParameter("unpaired samples: grids or dimensions differ".into()));
        }
    }
    Ok(())
}

fn sq_dist<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    x.iter().zip(y).map(|(u, v)| (u.f64() - v.f64()).powi(2)).sum()
}

/// `max_j |a_j - b_j|^2` for one pair of paths.
pub fn path_max_sq<T: Scalar>(a: &SchemePath<T>, b: &SchemePath<T>) -> f64 {
    a.states().zip(b.states()).map(|(x, y)| sq_dist(x, y)).fold(0.0, f64::max)
}

fn summary(h: f64, a: &str, b: &str, estimator: Estimator, (value, stderr): (f64, f64), n: usize) -> ErrorSummary {
    ErrorSummary { h, scheme: a.into(), against: b.into(), estimator, value, stderr, n }
}

pub fn strong_error_max<T: Scalar>(a: &[SchemePath<T>], b: &[SchemePath<T>]) -> Result<ErrorSummary> {
    check_paired(a, b)?;
    let m: Vec<f64> = a.iter().zip(b).map(|(x, y)| path_max_sq(x, y)).collect();
    let est = root_of(mean_stderr(&m));
    Ok(summary(a[0].h().f64(), a[0].scheme().name(), b[0].scheme().name(), Estimator::StrongMax, est, m.len()))
}

pub fn fixed_time_error<T: Scalar>(a: &[SchemePath<T>], b: &[SchemePath<T>]) -> Result<ErrorSummary> {
    check_paired(a, b)?;
    let mut best = (0.0, 0.0);
    for j in 0..a[0].len() {
        let e: Vec<f64> = a.iter().zip(b).map(|(x, y)| sq_dist(x.state(j), y.state(j))).collect();
        let est = root_of(mean_stderr(&e));
        if est.0 > best.0 {
            best = est;
        }
    }
    Ok(summary(a[0].h().f64(), a[0].scheme().name(), b[0].scheme().name(), Estimator::FixedTime, best, a.len()))
}

/// Exact empirical W_2 between two equally sized samples on the line (sorted pairing).
pub fn quantile_w2_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("quantile_w2_1d needs non-empty samples".into()));
    }
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!("quantile_w2_1d needs equal sizes, got {} and {}", a.len(), b.len())));
    }
    let sorted = |x: &[f64]| {
        let mut v = x.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    Ok((compensated_sum(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y))) / a.len() as f64).sqrt())
}

/// `quantile_w2_1d` with a rough standard error that treats the sorted-pair
/// differences as independent.
pub fn quantile_w2_1d_se(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    quantile_w2_1d(a, b)?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let sq: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).collect();
    Ok(root_of(mean_stderr(&sq)))
}

/// Least-squares line through `(log h, log err)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_slope(hs: &[f64], errs: &[f64]) -> Result<SlopeFit> {
    if hs.len() != errs.len() || hs.len() < 2 {
        return Err(Error::InvalidParameter("fit_slope needs at least two (h, err) pairs".into()));
    }
    if hs.iter().chain(errs).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("fit_slope needs positive finite inputs".into()));
    }
    let x: Vec<f64> = hs.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("fit_slope needs at least two distinct h".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x.iter().zip(&y).map(|(u, v)| (v - intercept - slope * u).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SlopeFit { slope, intercept, residual })
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("ks_statistic needs samples".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let f = cdf(*x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

/// Asymptotic p-value of the KS statistic `d` at sample size `n` (Stephens' finite-n correction).
pub fn ks_pvalue(n: usize, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-2.0 * k * k * lambda * lambda).exp();
        p += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().cdf(z)
}
