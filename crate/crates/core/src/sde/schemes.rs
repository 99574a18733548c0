use std::cell::RefCell;
use std::fmt;
use std::io::Write;

use super::flow::{ode_flow, FlowConfig};
use super::VectorFieldSystem;
use crate::coupling::{AreaBlocks, BrownianBlocks};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Euler,
    Milstein,
    Davie,
    /// Level-2 log-ODE with true Levy areas.
    LogOde,
    /// Level-2 log-ODE with Gaussian area substitutes.
    GaussianLogOde,
    /// Log-ODE without area terms.
    LogOdeLevel1,
    /// Closed-form solution of a benchmark.
    Exact,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Milstein => "milstein",
            Self::Davie => "davie",
            Self::LogOde => "logode",
            Self::GaussianLogOde => "gaussian-logode",
            Self::LogOdeLevel1 => "logode-level1",
            Self::Exact => "exact",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::Euler, Self::Milstein, Self::Davie, Self::LogOde, Self::GaussianLogOde, Self::LogOdeLevel1, Self::Exact]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

/// Which area increments drove a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AreaFamily {
    None,
    Levy,
    Gaussian,
}

impl AreaFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Levy => "levy",
            Self::Gaussian => "gaussian",
        }
    }
}

/// Scheme output `x_0, ..., x_N` on the grid `t_j = j h`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemePath<T> {
    scheme: Scheme,
    family: AreaFamily,
    q: usize,
    h: T,
    states: Vec<T>,
}

impl<T: Scalar> SchemePath<T> {
    /// Wraps precomputed states `x_0..x_N` (flattened, q per point).
    pub fn from_states(scheme: Scheme, family: AreaFamily, q: usize, h: T, states: Vec<T>) -> Result<Self> {
        if q == 0 || states.is_empty() || states.len() % q != 0 {
            return Err(Error::DimensionMismatch(format!("{} values do not form points of dimension {q}", states.len())));
        }
        Ok(Self { scheme, family, q, h, states })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn family(&self) -> AreaFamily {
        self.family
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Number of grid points, N + 1.
    pub fn len(&self) -> usize {
        self.states.len() / self.q
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, j: usize) -> &[T] {
        &self.states[j * self.q..(j + 1) * self.q]
    }

    pub fn states(&self) -> impl Iterator<Item = &[T]> {
        self.states.chunks(self.q)
    }

    pub fn last(&self) -> &[T] {
        self.state(self.len() - 1)
    }

    /// Every `factor`-th grid point, for comparison with a coarser grid.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        let n = self.len() - 1;
        if factor == 0 || n % factor != 0 {
            return Err(Error::InvalidParameter(format!("cannot subsample {n} steps by {factor}")));
        }
        let states = (0..=n / factor).flat_map(|j| self.state(j * factor).iter().copied()).collect();
        Ok(Self { states, h: self.h * T::of_usize(factor), ..self.clone() })
    }

    /// CSV with columns `j,t,x1..xq` after a one-line metadata comment.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# scheme-path v1 scheme={} areas={} q={} h={}", self.scheme, self.family.name(), self.q, self.h)?;
        let cols: Vec<String> = (1..=self.q).map(|i| format!("x{i}")).collect();
        writeln!(w, "j,t,{}", cols.join(","))?;
        for (j, x) in self.states().enumerate() {
            let xs: Vec<String> = x.iter().map(|v| v.f64().to_string()).collect();
            writeln!(w, "{j},{},{}", self.h.f64() * j as f64, xs.join(","))?;
        }
        Ok(())
    }
}

fn check<T: Scalar>(vf: &VectorFieldSystem<T>, x0: &[T], w: &BrownianBlocks<T>, a: Option<&AreaBlocks<T>>) -> Result<()> {
    if x0.len() != vf.q() {
        return Err(Error::DimensionMismatch(format!("x0 has {} entries, system has q = {}", x0.len(), vf.q())));
    }
    if w.d() != vf.d() {
        return Err(Error::DimensionMismatch(format!("driver has d = {}, system has d = {}", w.d(), vf.d())));
    }
    if let Some(a) = a {
        if a.n() != w.n() || a.d() != w.d() {
            return Err(Error::DimensionMismatch("areas and increments disagree on (N, d)".into()));
        }
    }
    Ok(())
}

fn run<T: Scalar>(
    scheme: Scheme,
    family: AreaFamily,
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    mut step: impl FnMut(usize, &[T], &mut [T]) -> Result<()>,
) -> Result<SchemePath<T>> {
    let q = vf.q();
    let mut states = Vec::with_capacity((w.n() + 1) * q);
    states.extend_from_slice(x0);
    let mut next = vec![T::zero(); q];
    for j in 0..w.n() {
        step(j, &states[j * q..], &mut next)?;
        states.extend_from_slice(&next);
    }
    Ok(SchemePath { scheme, family, q, h: w.h(), states })
}

fn axpy<T: Scalar>(out: &mut [T], a: T, x: &[T]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * *v;
    }
}

/// `x_{j+1} = x_j + sum_k V_k(x_j) W_k + V_0(x_j) h` with the Ito drift.
pub fn euler_path<T: Scalar>(vf: &VectorFieldSystem<T>, x0: &[T], w: &BrownianBlocks<T>) -> Result<SchemePath<T>> {
    check(vf, x0, w, None)?;
    let mut t = vec![T::zero(); vf.q()];
    run(Scheme::Euler, AreaFamily::None, vf, x0, w, |j, x, out| {
        let x = &x[..vf.q()];
        out.copy_from_slice(x);
        vf.ito_drift(x, &mut t)?;
        axpy(out, w.h(), &t);
        for (k, wk) in w.block(j).iter().enumerate() {
            vf.field(k, x, &mut t);
            axpy(out, *wk, &t);
        }
        Ok(())
    })
}

fn milstein_like<T: Scalar>(
    scheme: Scheme,
    family: AreaFamily,
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    a: &AreaBlocks<T>,
) -> Result<SchemePath<T>> {
    check(vf, x0, w, Some(a))?;
    let (q, d, h) = (vf.q(), vf.d(), w.h());
    let mut t = vec![T::zero(); q];
    run(scheme, family, vf, x0, w, |j, x, out| {
        let x = &x[..q];
        let wj = w.block(j);
        out.copy_from_slice(x);
        vf.ito_drift(x, &mut t)?;
        axpy(out, h, &t);
        for (k, wk) in wj.iter().enumerate() {
            vf.field(k, x, &mut t);
            axpy(out, *wk, &t);
        }
        for (p, ap) in a.block(j).iter().enumerate() {
            vf.bracket(p, x, &mut t)?;
            axpy(out, *ap, &t);
        }
        for k in 0..d {
            for l in 0..d {
                let mut c = wj[k] * wj[l];
                if k == l {
                    c -= h;
                }
                vf.directional(k, l, x, &mut t)?;
                axpy(out, T::of(0.5) * c, &t);
            }
        }
        Ok(())
    })
}

/// Ito-Taylor order-one scheme with the true areas `a`.
pub fn milstein_path<T: Scalar>(
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    a: &AreaBlocks<T>,
) -> Result<SchemePath<T>> {
    milstein_like(Scheme::Milstein, AreaFamily::Levy, vf, x0, w, a)
}

/// The Milstein update with Gaussian substitutes `b` in place of the areas.
pub fn davie_path<T: Scalar>(
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    b: &AreaBlocks<T>,
) -> Result<SchemePath<T>> {
    milstein_like(Scheme::Davie, AreaFamily::Gaussian, vf, x0, w, b)
}

fn logode_like<T: Scalar>(
    scheme: Scheme,
    family: AreaFamily,
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    area: Option<&AreaBlocks<T>>,
    cfg: &FlowConfig,
) -> Result<SchemePath<T>> {
    check(vf, x0, w, area)?;
    let (q, h) = (vf.q(), w.h());
    let scratch = RefCell::new(vec![T::zero(); q]);
    run(scheme, family, vf, x0, w, |j, x, out| {
        let wj = w.block(j);
        let aj = area.map(|a| a.block(j));
        let field = |y: &[T], f: &mut [T]| -> Result<()> {
            let mut t = scratch.borrow_mut();
            vf.stratonovich_drift(y, f)?;
            f.iter_mut().for_each(|v| *v *= h);
            for (k, wk) in wj.iter().enumerate() {
                vf.field(k, y, &mut t);
                axpy(f, *wk, &t);
            }
            if let Some(aj) = aj {
                for (p, ap) in aj.iter().enumerate() {
                    vf.bracket(p, y, &mut t)?;
                    axpy(f, *ap, &t);
                }
            }
            Ok(())
        };
        let y = ode_flow(field, &x[..q], cfg).map_err(|e| match e {
            Error::FlowFailure { reason, .. } => Error::FlowFailure { block: j, reason },
            e => e,
        })?;
        out.copy_from_slice(&y);
        Ok(())
    })
}

/// Level-2 log-ODE with the true areas.
pub fn logode_path<T: Scalar>(
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    a: &AreaBlocks<T>,
    cfg: &FlowConfig,
) -> Result<SchemePath<T>> {
    logode_like(Scheme::LogOde, AreaFamily::Levy, vf, x0, w, Some(a), cfg)
}

/// Level-2 log-ODE driven by Gaussian area substitutes.
pub fn gaussian_logode_path<T: Scalar>(
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    b: &AreaBlocks<T>,
    cfg: &FlowConfig,
) -> Result<SchemePath<T>> {
    logode_like(Scheme::GaussianLogOde, AreaFamily::Gaussian, vf, x0, w, Some(b), cfg)
}

pub fn logode_level1_path<T: Scalar>(
    vf: &VectorFieldSystem<T>,
    x0: &[T],
    w: &BrownianBlocks<T>,
    cfg: &FlowConfig,
) -> Result<SchemePath<T>> {
    logode_like(Scheme::LogOdeLevel1, AreaFamily::None, vf, x0, w, None, cfg)
}
