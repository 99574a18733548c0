//! Vector-field systems and the Euler, Milstein, Davie and log-ODE schemes.
//!
//! The diffusion fields act in the Stratonovich sense. The drift can be given
//! in either convention and is converted on demand: Euler, Milstein and Davie
//! use the Ito drift, the log-ODE schemes use the Stratonovich drift.

mod flow;
mod schemes;

use std::fmt;
use std::sync::Arc;

pub use flow::{ode_flow, FlowConfig};
pub use schemes::{
    davie_path, euler_path, gaussian_logode_path, logode_level1_path, logode_path, milstein_path, AreaFamily, Scheme,
    SchemePath,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::pairs;

/// `f(x, out)` writes a vector field value into `out`.
pub type Field<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;
/// `f(x, out)` writes the row-major q x q Jacobian `d f_i / d x_j` into `out`.
pub type Jacobian<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftKind {
    Stratonovich,
    Ito,
}

#[derive(Clone)]
enum Brackets<T> {
    FiniteDifference,
    Analytic(Vec<Field<T>>),
}

/// `dx = V_0(x) dt + sum_k V_k(x) o dW_k` on R^q.
#[derive(Clone)]
pub struct VectorFieldSystem<T> {
    q: usize,
    drift: Option<(Field<T>, DriftKind)>,
    fields: Vec<Field<T>>,
    jacobians: Option<Vec<Jacobian<T>>>,
    brackets: Brackets<T>,
    allow_fd: bool,
}

impl<T> fmt::Debug for VectorFieldSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFieldSystem")
            .field("q", &self.q)
            .field("d", &self.fields.len())
            .field("drift", &self.drift.as_ref().map(|d| d.1))
            .field("jacobians", &self.jacobians.is_some())
            .field("analytic_brackets", &matches!(self.brackets, Brackets::Analytic(_)))
            .finish()
    }
}

fn fd_step<T: Scalar>() -> T {
    T::of(1e-5).max(T::epsilon().cbrt())
}

fn norm<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|v| *v * *v).sum::<T>().sqrt()
}

impl<T: Scalar> VectorFieldSystem<T> {
    /// Driftless system with the given diffusion fields.
    pub fn new(q: usize, fields: Vec<Field<T>>) -> Result<Self> {
        if q == 0 || fields.is_empty() {
            return Err(Error::InvalidParameter("need q >= 1 and at least one diffusion field".into()));
        }
        Ok(Self { q, drift: None, fields, jacobians: None, brackets: Brackets::FiniteDifference, allow_fd: true })
    }

    /// Linear fields `V_k(x) = A_k x` (row-major q x q), with analytic Jacobians and brackets.
    pub fn linear(q: usize, mats: Vec<Vec<T>>) -> Result<Self> {
        if mats.iter().any(|a| a.len() != q * q) {
            return Err(Error::DimensionMismatch(format!("linear fields need {q}x{q} matrices")));
        }
        let mats: Vec<Arc<Vec<T>>> = mats.into_iter().map(Arc::new).collect();
        let field = |a: Arc<Vec<T>>| -> Field<T> { Arc::new(move |x, out| matvec(&a, x, out)) };
        let jac = |a: Arc<Vec<T>>| -> Jacobian<T> { Arc::new(move |_, out| out.copy_from_slice(&a)) };
        let d = mats.len();
        let brackets = pairs(d)
            .map(|(k, l)| {
                // [V_k, V_l](x) = (A_l A_k - A_k A_l) x
                let c = Arc::new(matsub(&matmul(&mats[l], &mats[k], q), &matmul(&mats[k], &mats[l], q)));
                field(c)
            })
            .collect();
        let mut s = Self::new(q, mats.iter().cloned().map(field).collect())?;
        s.jacobians = Some(mats.into_iter().map(jac).collect());
        s.brackets = Brackets::Analytic(brackets);
        Ok(s)
    }

    /// Stratonovich drift.
    pub fn with_drift(mut self, f: Field<T>) -> Self {
        self.drift = Some((f, DriftKind::Stratonovich));
        self
    }

    pub fn with_ito_drift(mut self, f: Field<T>) -> Self {
        self.drift = Some((f, DriftKind::Ito));
        self
    }

    pub fn with_jacobians(mut self, jacobians: Vec<Jacobian<T>>) -> Result<Self> {
        if jacobians.len() != self.fields.len() {
            return Err(dim("jacobians", self.fields.len(), jacobians.len()));
        }
        self.jacobians = Some(jacobians);
        Ok(self)
    }

    /// Analytic brackets `[V_k, V_l]` for `k < l` in lexicographic order.
    pub fn with_brackets(mut self, brackets: Vec<Field<T>>) -> Result<Self> {
        let n = self.d() * (self.d() - 1) / 2;
        if brackets.len() != n {
            return Err(dim("brackets", n, brackets.len()));
        }
        self.brackets = Brackets::Analytic(brackets);
        Ok(self)
    }

    /// Forbid finite-difference derivatives; Milstein/Davie then need Jacobians.
    pub fn without_finite_differences(mut self) -> Self {
        self.allow_fd = false;
        self
    }

    /// Replaces brackets by finite-difference ones built from the fields
    /// (or Jacobians when present). Linear systems keep their exact brackets.
    pub fn synth_brackets(mut self) -> Self {
        if self.jacobians.is_none() || !matches!(self.brackets, Brackets::Analytic(_)) {
            self.brackets = Brackets::FiniteDifference;
        }
        self
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn d(&self) -> usize {
        self.fields.len()
    }

    pub fn has_jacobians(&self) -> bool {
        self.jacobians.is_some()
    }

    pub fn has_analytic_brackets(&self) -> bool {
        matches!(self.brackets, Brackets::Analytic(_))
    }

    pub fn drift_kind(&self) -> Option<DriftKind> {
        self.drift.as_ref().map(|d| d.1)
    }

    pub fn field(&self, k: usize, x: &[T], out: &mut [T]) {
        (self.fields[k])(x, out)
    }

    /// `(V_k . grad) V_l` at x: Jacobian of V_l applied to V_k.
    pub fn directional(&self, k: usize, l: usize, x: &[T], out: &mut [T]) -> Result<()> {
        let q = self.q;
        let mut vk = vec![T::zero(); q];
        self.field(k, x, &mut vk);
        if let Some(j) = &self.jacobians {
            let mut jl = vec![T::zero(); q * q];
            (j[l])(x, &mut jl);
            matvec(&jl, &vk, out);
            return Ok(());
        }
        if !self.allow_fd {
            return Err(Error::InvalidParameter("no Jacobians and finite differences are disabled".into()));
        }
        let nv = norm(&vk);
        if nv == T::zero() {
            out.iter_mut().for_each(|o| *o = T::zero());
            return Ok(());
        }
        let eps = fd_step::<T>() * (T::one() + norm(x)) / nv;
        let xp: Vec<T> = x.iter().zip(&vk).map(|(a, v)| *a + eps * *v).collect();
        let xm: Vec<T> = x.iter().zip(&vk).map(|(a, v)| *a - eps * *v).collect();
        let mut fm = vec![T::zero(); q];
        self.field(l, &xp, out);
        self.field(l, &xm, &mut fm);
        let two_eps = eps + eps;
        for (o, m) in out.iter_mut().zip(fm) {
            *o = (*o - m) / two_eps;
        }
        Ok(())
    }

    /// `[V_k, V_l] = (V_k . grad) V_l - (V_l . grad) V_k` for `k < l`, indexed by pair.
    pub fn bracket(&self, pair: usize, x: &[T], out: &mut [T]) -> Result<()> {
        if let Brackets::Analytic(b) = &self.brackets {
            (b[pair])(x, out);
            return Ok(());
        }
        self.bracket_fd(pair, x, out)
    }

    /// Bracket from derivatives of the fields, ignoring analytic brackets.
    pub fn bracket_fd(&self, pair: usize, x: &[T], out: &mut [T]) -> Result<()> {
        let (k, l) = pairs(self.d()).nth(pair).ok_or_else(|| Error::InvalidParameter(format!("no bracket {pair}")))?;
        let mut t = vec![T::zero(); self.q];
        self.directional(k, l, x, out)?;
        self.directional(l, k, x, &mut t)?;
        for (o, v) in out.iter_mut().zip(t) {
            *o -= v;
        }
        Ok(())
    }

    /// `max |analytic - finite difference|` over the given points; zero without analytic brackets.
    pub fn bracket_consistency(&self, points: &[Vec<T>]) -> Result<T> {
        let Brackets::Analytic(b) = &self.brackets else { return Ok(T::zero()) };
        let mut worst = T::zero();
        let (mut a, mut f) = (vec![T::zero(); self.q], vec![T::zero(); self.q]);
        for x in points {
            for (p, br) in b.iter().enumerate() {
                br(x, &mut a);
                self.bracket_fd(p, x, &mut f)?;
                for (u, v) in a.iter().zip(&f) {
                    worst = worst.max((*u - *v).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `1/2 sum_k (V_k . grad) V_k`, the Ito-minus-Stratonovich drift.
    fn ito_correction(&self, x: &[T], out: &mut [T]) -> Result<()> {
        let mut t = vec![T::zero(); self.q];
        out.iter_mut().for_each(|o| *o = T::zero());
        for k in 0..self.d() {
            self.directional(k, k, x, &mut t)?;
            for (o, v) in out.iter_mut().zip(&t) {
                *o += T::of(0.5) * *v;
            }
        }
        Ok(())
    }

    /// Drift in the requested convention; an absent drift is Stratonovich zero.
    fn drift_in(&self, kind: DriftKind, x: &[T], out: &mut [T]) -> Result<()> {
        let stored = match &self.drift {
            Some((f, k)) => {
                f(x, out);
                *k
            }
            None => {
                out.iter_mut().for_each(|o| *o = T::zero());
                DriftKind::Stratonovich
            }
        };
        if stored == kind {
            return Ok(());
        }
        let mut c = vec![T::zero(); self.q];
        self.ito_correction(x, &mut c)?;
        let sign = if kind == DriftKind::Ito { T::one() } else { -T::one() };
        for (o, v) in out.iter_mut().zip(c) {
            *o += sign * v;
        }
        Ok(())
    }

    pub fn ito_drift(&self, x: &[T], out: &mut [T]) -> Result<()> {
        self.drift_in(DriftKind::Ito, x, out)
    }

    pub fn stratonovich_drift(&self, x: &[T], out: &mut [T]) -> Result<()> {
        self.drift_in(DriftKind::Stratonovich, x, out)
    }
}

fn dim(what: &str, expected: usize, got: usize) -> Error {
    Error::DimensionMismatch(format!("{what}: expected {expected}, got {got}"))
}

fn matvec<T: Scalar>(a: &[T], x: &[T], out: &mut [T]) {
    let q = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = a[i * q..(i + 1) * q].iter().zip(x).map(|(u, v)| *u * *v).sum();
    }
}

fn matmul<T: Scalar>(a: &[T], b: &[T], q: usize) -> Vec<T> {
    let mut c = vec![T::zero(); q * q];
    for i in 0..q {
        for k in 0..q {
            let aik = a[i * q + k];
            for j in 0..q {
                c[i * q + j] += aik * b[k * q + j];
            }
        }
    }
    c
}

fn matsub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}
