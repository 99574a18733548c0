//! Conditional law of summed Levy areas given the Brownian increments (d = 2).
//!
//! For a set of n blocks with `S = sum |W_r|^2`, the sum of areas in units of h
//! has characteristic function
//!
//! ```text
//! phi(v) = [(v/2) / sinh(v/2)]^n * exp((S/h)/2 * (1 - (v/2) coth(v/2)))
//! ```
//!
//! and variance `(n + S/h)/12`. Densities of the standardised sum are tabulated
//! per n on a grid of `theta = n / (n + S/h)` in [0, 1] by FFT inversion.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const THETA_STEPS: usize = 128;
const DW: f64 = 0.05;
const FFT_LEN: usize = 8192;
/// Standardised range kept in the tables; beyond, tails are log-linear.
pub(crate) const Z_MAX: f64 = 40.0;
const DENSITY_FLOOR: f64 = 1e-13;

/// `log(x / sinh x)`, stable for all x >= 0.
fn log_x_over_sinh(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        -x2 / 6.0 + x2 * x2 / 180.0 - x2 * x2 * x2 / 2835.0
    } else {
        x.ln() - x - (-(-2.0 * x).exp()).ln_1p() + std::f64::consts::LN_2
    }
}

/// `1 - x coth x`.
fn one_minus_x_coth(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        -x2 / 3.0 + x2 * x2 / 45.0 - 2.0 * x2 * x2 * x2 / 945.0
    } else {
        1.0 - x / x.tanh()
    }
}

/// Characteristic function of `sum_{r in E} A_r / h` given `n = |E|` and `sbar = S/(n h)`.
pub fn levy_area_cf(n: usize, sbar: f64, v: f64) -> f64 {
    let x = 0.5 * v.abs();
    let nf = n as f64;
    (nf * log_x_over_sinh(x) + 0.5 * nf * sbar * one_minus_x_coth(x)).exp()
}

/// Log-CF of the standardised sum at parameter theta.
fn log_cf_std(n: usize, theta: f64, w: f64) -> f64 {
    if theta <= 0.0 {
        return -0.5 * w * w;
    }
    let nf = n as f64;
    let v = w * (12.0 * theta / nf).sqrt();
    let x = 0.5 * v.abs();
    nf * log_x_over_sinh(x) + 0.5 * nf * (1.0 / theta - 1.0) * one_minus_x_coth(x)
}

struct Row {
    /// log density at z_i = i dz, i < logf.len()
    logf: Vec<f64>,
    /// int_0^{z_i} f
    g: Vec<f64>,
    /// log-density slope used beyond the last stored point
    slope: f64,
}

pub(crate) struct LevyTable {
    dz: f64,
    rows: Vec<Row>,
}

fn build_row(n: usize, theta: f64, fft: &dyn rustfft::Fft<f64>) -> Row {
    let dz = 2.0 * PI / (FFT_LEN as f64 * DW);
    let mut cos_in = vec![Complex::new(0.0, 0.0); FFT_LEN];
    let mut sin_in = vec![Complex::new(0.0, 0.0); FFT_LEN];
    for k in 0..FFT_LEN / 2 {
        let w = k as f64 * DW;
        let lc = log_cf_std(n, theta, w);
        if lc < -745.0 {
            break;
        }
        let c = lc.exp();
        cos_in[k].re = if k == 0 { 0.5 * c } else { c };
        if k > 0 {
            sin_in[k].re = c / w;
        }
    }
    fft.process(&mut cos_in);
    fft.process(&mut sin_in);
    let nz = (Z_MAX / dz).ceil() as usize + 1;
    let mut logf = Vec::with_capacity(nz);
    let mut g = Vec::with_capacity(nz);
    for j in 0..nz {
        let z = j as f64 * dz;
        let f = DW / PI * cos_in[j].re;
        if !(f > DENSITY_FLOOR) {
            break;
        }
        logf.push(f.ln());
        g.push(DW / PI * (0.5 * z - sin_in[j].im));
    }
    let back = ((0.5 / dz).round() as usize).min(logf.len() - 1).max(1);
    let last = logf.len() - 1;
    let slope = ((logf[last] - logf[last - back]) / (back as f64 * dz)).min(-1e-3);
    Row { logf, g, slope }
}

impl LevyTable {
    fn build(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(FFT_LEN);
        let rows = (0..=THETA_STEPS).map(|i| build_row(n, i as f64 / THETA_STEPS as f64, &*fft)).collect();
        Self { dz: 2.0 * PI / (FFT_LEN as f64 * DW), rows }
    }

    fn row_logf(&self, r: &Row, z: f64) -> f64 {
        let x = z / self.dz;
        let j = x as usize;
        if j + 1 < r.logf.len() {
            let t = x - j as f64;
            r.logf[j] + t * (r.logf[j + 1] - r.logf[j])
        } else {
            let last = r.logf.len() - 1;
            r.logf[last] + r.slope * (z - last as f64 * self.dz)
        }
    }

    /// Upper tail `P(Z > z)`, z >= 0.
    fn row_upper(&self, r: &Row, z: f64) -> f64 {
        let x = z / self.dz;
        let j = x as usize;
        if j + 1 < r.g.len() {
            // cubic Hermite on G with G' = f
            let t = x - j as f64;
            let (g0, g1) = (r.g[j], r.g[j + 1]);
            let (f0, f1) = (r.logf[j].exp() * self.dz, r.logf[j + 1].exp() * self.dz);
            let (t2, t3) = (t * t, t * t * t);
            let g = (2.0 * t3 - 3.0 * t2 + 1.0) * g0 + (t3 - 2.0 * t2 + t) * f0 + (-2.0 * t3 + 3.0 * t2) * g1 + (t3 - t2) * f1;
            (0.5 - g).max(0.0)
        } else {
            (self.row_logf(r, z).exp() / -r.slope).min(0.5)
        }
    }

    fn rows_at(&self, theta: f64) -> (&Row, &Row, f64) {
        let x = theta.clamp(0.0, 1.0) * THETA_STEPS as f64;
        let i = (x as usize).min(THETA_STEPS - 1);
        (&self.rows[i], &self.rows[i + 1], x - i as f64)
    }

    /// Log density of the standardised sum.
    pub(crate) fn log_density(&self, theta: f64, z: f64) -> f64 {
        let (a, b, t) = self.rows_at(theta);
        let z = z.abs();
        let (la, lb) = (self.row_logf(a, z), self.row_logf(b, z));
        la + t * (lb - la)
    }

    /// `(P(Z <= z), P(Z > z))` of the standardised sum.
    pub(crate) fn cdf_pair(&self, theta: f64, z: f64) -> (f64, f64) {
        let (a, b, t) = self.rows_at(theta);
        let za = z.abs();
        let (qa, qb) = (self.row_upper(a, za), self.row_upper(b, za));
        let q = qa + t * (qb - qa);
        if z >= 0.0 {
            (1.0 - q, q)
        } else {
            (q, 1.0 - q)
        }
    }
}

/// Table for sums of n blocks, built once per process.
pub(crate) fn table(n: usize) -> Arc<LevyTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LevyTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("table cache").get(&n) {
        return t.clone();
    }
    let t = Arc::new(LevyTable::build(n));
    cache.lock().expect("table cache").entry(n).or_insert(t).clone()
}

/// Density of the sum of areas (units of h) for n blocks with `S/h = s`.
pub fn levy_sum_density(n: usize, s: f64, x: f64) -> f64 {
    let sigma = ((n as f64 + s) / 12.0).sqrt();
    let theta = n as f64 / (n as f64 + s);
    (table(n).log_density(theta, x / sigma)).exp() / sigma
}

/// `P(sum <= x)` for the sum of areas (units of h) of n blocks with `S/h = s`.
pub fn levy_sum_cdf(n: usize, s: f64, x: f64) -> f64 {
    let sigma = ((n as f64 + s) / 12.0).sqrt();
    let theta = n as f64 / (n as f64 + s);
    table(n).cdf_pair(theta, x / sigma).0
}

/// One child of a split: its block count, `S/h`, and table.
pub(crate) struct Part {
    pub table: Arc<LevyTable>,
    pub theta: f64,
    pub sigma: f64,
}

impl Part {
    pub(crate) fn with_table(table: Arc<LevyTable>, n: usize, s: f64) -> Self {
        let nf = n as f64;
        Self { table, theta: nf / (nf + s), sigma: ((nf + s) / 12.0).sqrt() }
    }

    fn log_density(&self, x: f64) -> f64 {
        self.table.log_density(self.theta, x / self.sigma)
    }
}

const COARSE: usize = 128;
const FINE: usize = 256;

/// `(P(X <= x | X + Y = s), P(X > x | X + Y = s))` for independent parts X, Y.
pub(crate) fn conditional_cdf(px: &Part, py: &Part, s: f64, x: f64) -> (f64, f64) {
    let lo = (-Z_MAX * px.sigma).max(s - Z_MAX * py.sigma);
    let hi = (Z_MAX * px.sigma).min(s + Z_MAX * py.sigma);
    let ell = |y: f64| px.log_density(y) + py.log_density(s - y);
    if !(hi > lo) {
        // disjoint supports only for astronomically unlikely s; fall back to the Gaussian split
        let v = px.sigma * px.sigma + py.sigma * py.sigma;
        let mean = px.sigma * px.sigma / v * s;
        let sd = px.sigma * py.sigma / v.sqrt();
        let z = (x - mean) / sd;
        return (normal_cdf(z), normal_cdf(-z));
    }
    let step = (hi - lo) / COARSE as f64;
    let coarse: Vec<f64> = (0..=COARSE).map(|i| ell(lo + step * i as f64)).collect();
    let top = coarse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let keep = |v: f64| v > top - 50.0;
    let first = coarse.iter().position(|&v| keep(v)).unwrap_or(0);
    let last = coarse.iter().rposition(|&v| keep(v)).unwrap_or(COARSE);
    let a = lo + step * first.saturating_sub(1) as f64;
    let b = lo + step * (last + 1).min(COARSE) as f64;
    let dx = (b - a) / FINE as f64;
    let g: Vec<f64> = (0..=FINE).map(|i| (ell(a + dx * i as f64) - top).exp()).collect();
    let panel = |i: usize| dx / 3.0 * (g[2 * i] + 4.0 * g[2 * i + 1] + g[2 * i + 2]);
    let total: f64 = (0..FINE / 2).map(panel).sum();
    let lower = if x <= a {
        0.0
    } else if x >= b {
        total
    } else {
        let t = (x - a) / dx;
        let p = ((t / 2.0) as usize).min(FINE / 2 - 1);
        let full: f64 = (0..p).map(panel).sum();
        let t = t - 2.0 * p as f64;
        let (g0, g1, g2) = (g[2 * p], g[2 * p + 1], g[2 * p + 2]);
        let (t2, t3) = (t * t, t * t * t);
        full + dx * (g0 * (t - 0.75 * t2 + t3 / 6.0) + g1 * (t2 - t3 / 3.0) + g2 * (t3 / 6.0 - 0.25 * t2))
    };
    let lower = lower.clamp(0.0, total);
    (lower / total, (total - lower) / total)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile from a `(p, 1 - p)` pair, accurate in both tails.
pub(crate) fn normal_quantile_pair(lower: f64, upper: f64) -> f64 {
    const EPS: f64 = 1e-300;
    if lower <= upper {
        -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * lower.max(EPS))
    } else {
        std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * upper.max(EPS))
    }
}
