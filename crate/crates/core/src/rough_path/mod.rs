//! Piecewise abelian rough paths: one Lie log-increment per grid block, the
//! path moving geodesically (log-linearly) inside each block.

mod io;
mod metrics;

pub use io::{read_csv, write_csv};
pub use metrics::{
    greedy_count, grid_p_variation, grid_p_variation_distance, inhom_distance, GridMetricReport, GridSpec,
    HolderOrPVar, MetricKind, PVarMode,
};

use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{GroupElement, LieElement};

#[derive(Clone, Debug, PartialEq)]
pub struct PAPath<T> {
    dim: usize,
    level: usize,
    h: T,
    blocks: Vec<LieElement<T>>,
}

fn time_tol<T: Scalar>() -> T {
    T::of(1e-12).max(T::epsilon() * T::of(16.0))
}

impl<T: Scalar> PAPath<T> {
    /// Builds the path `X_{0,t} = X_{0,jh} (x) exp((t - jh)/h xi_j)` on block j.
    pub fn build(log_increments: Vec<LieElement<T>>, h: T) -> Result<Self> {
        let first = log_increments
            .first()
            .ok_or_else(|| Error::InvalidParameter("a path needs at least one block".into()))?;
        let (dim, level) = (first.dim(), first.level());
        for (j, x) in log_increments.iter().enumerate() {
            if (x.dim(), x.level()) != (dim, level) {
                return Err(dim_mismatch(
                    &format!("block {j} (d, n)"),
                    format!("({dim}, {level})"),
                    format!("({}, {})", x.dim(), x.level()),
                ));
            }
        }
        let n = T::of_usize(log_increments.len());
        if !(h > T::zero()) || (h * n - T::one()).abs() > time_tol() {
            return Err(Error::InvalidParameter(format!("step h = {h} does not match {} blocks", log_increments.len())));
        }
        Ok(Self { dim, level, h, blocks: log_increments })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[LieElement<T>] {
        &self.blocks
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !(t >= -time_tol::<T>() && t <= T::one() + time_tol::<T>()) {
            return Err(Error::InvalidParameter(format!("time {t} outside [0, 1]")));
        }
        Ok(())
    }

    /// Block containing t (the last block for t = 1) and the fraction of it before t.
    fn locate(&self, t: T) -> (usize, T) {
        let n = self.blocks.len();
        let x = (t / self.h).max(T::zero());
        let j = x.floor().to_usize().unwrap_or(0).min(n - 1);
        let frac = (x - T::of_usize(j)).max(T::zero()).min(T::one());
        (j, frac)
    }

    /// Group increment `X_{s,t} = X_s^{-1} (x) X_t`.
    pub fn increment(&self, s: T, t: T) -> Result<GroupElement<T>> {
        self.check_time(s)?;
        self.check_time(t)?;
        if s > t {
            return Err(Error::InvalidParameter(format!("increment needs s <= t, got s={s}, t={t}")));
        }
        let (js, fs) = self.locate(s);
        let (jt, ft) = self.locate(t);
        if js == jt {
            return Ok(self.blocks[js].scale(ft - fs).exp());
        }
        let mut g = self.blocks[js].scale(T::one() - fs).exp();
        for b in &self.blocks[js + 1..jt] {
            g = &g * &b.exp();
        }
        if ft > T::zero() {
            g = &g * &self.blocks[jt].scale(ft).exp();
        }
        Ok(g)
    }

    /// `X_{0,t}`.
    pub fn value(&self, t: T) -> Result<GroupElement<T>> {
        self.increment(T::zero(), t)
    }

    /// Values at block endpoints `X_{0,jh}`, j = 0..=N.
    pub fn grid_values(&self) -> Vec<GroupElement<T>> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let mut g = GroupElement::identity(self.dim, self.level).expect("valid shape");
        out.push(g.clone());
        for b in &self.blocks {
            g = &g * &b.exp();
            out.push(g.clone());
        }
        out
    }

    /// Same log-increments read in g^(kappa); blocks are exponentiated at level kappa.
    pub fn lift(&self, kappa: usize) -> Result<Self> {
        if self.level != 2 {
            return Err(Error::InvalidParameter(format!("lift expects a level-2 path, got level {}", self.level)));
        }
        if !(2..=5).contains(&kappa) {
            return Err(Error::InvalidParameter(format!("lift level {kappa} outside 2..=5")));
        }
        let blocks = self.blocks.iter().map(|b| b.embed(kappa)).collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: self.dim, level: kappa, h: self.h, blocks })
    }

    /// Projection pi_{0,k} of the path.
    pub fn project(&self, level: usize) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| b.truncate(level)).collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: self.dim, level, h: self.h, blocks })
    }

    /// Consecutive increments on the grid refined by `refine` points per block.
    pub(crate) fn step_increments(&self, refine: usize) -> Vec<GroupElement<T>> {
        let r = T::of_usize(refine);
        self.blocks
            .iter()
            .flat_map(|b| {
                let e = b.scale(T::one() / r).exp();
                std::iter::repeat_n(e, refine)
            })
            .collect()
    }

    pub(crate) fn same_layout(&self, other: &Self) -> Result<()> {
        if (self.dim, self.level, self.blocks.len()) != (other.dim, other.level, other.blocks.len())
            || (self.h - other.h).abs() > time_tol()
        {
            return Err(dim_mismatch(
                "paths (d, n, N)",
                format!("({}, {}, {})", self.dim, self.level, self.blocks.len()),
                format!("({}, {}, {})", other.dim, other.level, other.blocks.len()),
            ));
        }
        Ok(())
    }
}
