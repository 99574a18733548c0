//! Time-one flow of an autonomous ODE by classical fixed-step RK4.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SUBSTEPS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    substeps: usize,
    tolerance: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { substeps: 8, tolerance: None }
    }
}

impl FlowConfig {
    pub fn new(substeps: usize) -> Result<Self> {
        if substeps == 0 || substeps > MAX_SUBSTEPS {
            return Err(Error::InvalidParameter(format!("flow sub-steps must be in 1..={MAX_SUBSTEPS}, got {substeps}")));
        }
        Ok(Self { substeps, tolerance: None })
    }

    /// Keep doubling the sub-steps until successive results differ by at most `tol` (max norm).
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("flow tolerance must be positive, got {tol}")));
        }
        self.tolerance = Some(tol);
        Ok(self)
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn tolerance(&self) -> Option<f64> {
        self.tolerance
    }

    /// Always 4.
    pub fn order(&self) -> usize {
        4
    }
}

fn rk4<T: Scalar, F>(f: &F, y0: &[T], s: usize) -> Result<Vec<T>>
where
    F: Fn(&[T], &mut [T]) -> Result<()>,
{
    let q = y0.len();
    let dt = T::one() / T::of_usize(s);
    let half = T::of(0.5) * dt;
    let sixth = dt / T::of(6.0);
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); q], vec![T::zero(); q], vec![T::zero(); q], vec![T::zero(); q], vec![T::zero(); q]);
    for _ in 0..s {
        f(&y, &mut k1)?;
        for i in 0..q {
            tmp[i] = y[i] + half * k1[i];
        }
        f(&tmp, &mut k2)?;
        for i in 0..q {
            tmp[i] = y[i] + half * k2[i];
        }
        f(&tmp, &mut k3)?;
        for i in 0..q {
            tmp[i] = y[i] + dt * k3[i];
        }
        f(&tmp, &mut k4)?;
        for i in 0..q {
            y[i] += sixth * (k1[i] + (k2[i] + k3[i]) * T::of(2.0) + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::FlowFailure { block: 0, reason: "non-finite state".into() });
        }
    }
    Ok(y)
}

/// Approximates `exp(F)(y0)`, the solution at time 1 of `y' = F(y)`.
pub fn ode_flow<T: Scalar, F>(f: F, y0: &[T], cfg: &FlowConfig) -> Result<Vec<T>>
where
    F: Fn(&[T], &mut [T]) -> Result<()>,
{
    let mut s = cfg.substeps;
    let mut y = rk4(&f, y0, s)?;
    let Some(tol) = cfg.tolerance else { return Ok(y) };
    while s < MAX_SUBSTEPS {
        s *= 2;
        let y2 = rk4(&f, y0, s)?;
        let diff = y.iter().zip(&y2).map(|(a, b)| (*a - *b).abs().f64()).fold(0.0, f64::max);
        y = y2;
        if diff <= tol {
            return Ok(y);
        }
    }
    Err(Error::FlowFailure { block: 0, reason: format!("tolerance {tol} not reached with {s} sub-steps") })
}
