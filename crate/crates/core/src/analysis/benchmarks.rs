//! Named benchmark systems with checkable facts.

use std::sync::Arc;

use crate::coupling::{AreaBlocks, BrownianBlocks};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sde::{AreaFamily, Field, Jacobian, Scheme, SchemePath, VectorFieldSystem};

pub const BENCHMARKS: [&str; 7] = ["levy_area", "rotation", "circle", "cubic_drift", "linear_1d", "commuting", "smooth_2d"];

type ExactFn<T> = Arc<dyn Fn(&BrownianBlocks<T>, &AreaBlocks<T>, &[T]) -> Vec<T> + Send + Sync>;
type InvariantFn<T> = Arc<dyn Fn(T, &[T]) -> T + Send + Sync>;

/// A quantity `g(t, x)` that vanishes along true solutions.
#[derive(Clone)]
pub struct Invariant<T> {
    pub name: &'static str,
    g: InvariantFn<T>,
}

/// Boolean facts about a benchmark.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Facts {
    /// Level-2 log-ODE with the true areas is exact at grid points.
    pub logode_exact: bool,
    /// Milstein with the true areas is exact at grid points.
    pub milstein_exact: bool,
    /// All brackets `[V_k, V_l]` vanish.
    pub commuting: bool,
    /// Euler moments blow up as the step count grows.
    pub euler_moments_diverge: bool,
}

#[derive(Clone)]
pub struct Benchmark<T> {
    pub name: &'static str,
    pub system: VectorFieldSystem<T>,
    pub x0: Vec<T>,
    pub facts: Facts,
    pub invariants: Vec<Invariant<T>>,
    exact: Option<ExactFn<T>>,
}

impl<T> std::fmt::Debug for Benchmark<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Benchmark")
            .field("name", &self.name)
            .field("system", &self.system)
            .field("facts", &self.facts)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl<T: Scalar> Benchmark<T> {
    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Closed-form solution on the grid of `w`, when one is known.
    pub fn exact_path(&self, w: &BrownianBlocks<T>, a: &AreaBlocks<T>) -> Option<Result<SchemePath<T>>> {
        let f = self.exact.as_ref()?;
        if w.d() != self.system.d() || a.n() != w.n() || a.d() != w.d() {
            return Some(Err(Error::DimensionMismatch("driver does not match the benchmark".into())));
        }
        let family = if self.system.d() > 1 { AreaFamily::Levy } else { AreaFamily::None };
        Some(SchemePath::from_states(Scheme::Exact, family, self.system.q(), w.h(), f(w, a, &self.x0)))
    }

    /// `max_j |g(t_j, x_j)|` for every invariant.
    pub fn invariant_residuals(&self, path: &SchemePath<T>) -> Vec<(&'static str, T)> {
        self.invariants
            .iter()
            .map(|inv| {
                let r = path
                    .states()
                    .enumerate()
                    .map(|(j, x)| (inv.g)(path.h() * T::of_usize(j), x).abs())
                    .fold(T::zero(), T::max);
                (inv.name, r)
            })
            .collect()
    }
}

fn field<T: Scalar>(f: impl Fn(&[T], &mut [T]) + Send + Sync + 'static) -> Field<T> {
    Arc::new(f)
}

fn jac<T: Scalar>(f: impl Fn(&[T], &mut [T]) + Send + Sync + 'static) -> Jacobian<T> {
    Arc::new(f)
}

fn c<T: Scalar>(v: f64) -> T {
    T::of(v)
}

/// Cumulative sums of the increments of coordinate k, `x_0 + sum_{r<j} W_k^(r)`.
fn running<T: Scalar>(w: &BrownianBlocks<T>, k: usize) -> Vec<T> {
    let mut out = vec![T::zero()];
    for j in 0..w.n() {
        let last = *out.last().expect("non-empty");
        out.push(last + w.block(j)[k]);
    }
    out
}

/// `e^{theta J} x` with J the rotation generator `(x1, x2) -> (-x2, x1)`.
fn rotate<T: Scalar>(theta: T, x: &[T]) -> [T; 2] {
    let (s, co) = theta.sin_cos();
    [co * x[0] - s * x[1], s * x[0] + co * x[1]]
}

fn levy_area<T: Scalar>() -> Result<Benchmark<T>> {
    let half = c::<T>(0.5);
    let system = VectorFieldSystem::new(
        3,
        vec![
            field(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[T::one(), T::zero(), -half * x[1]])),
            field(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[T::zero(), T::one(), half * x[0]])),
        ],
    )?
    .with_jacobians(vec![
        jac(move |_: &[T], o: &mut [T]| {
            o.iter_mut().for_each(|v| *v = T::zero());
            o[7] = -half;
        }),
        jac(move |_: &[T], o: &mut [T]| {
            o.iter_mut().for_each(|v| *v = T::zero());
            o[6] = half;
        }),
    ])?
    .with_brackets(vec![field(|_: &[T], o: &mut [T]| o.copy_from_slice(&[T::zero(), T::zero(), T::one()]))])?;
    let exact: ExactFn<T> = Arc::new(move |w, a, x0| {
        let mut x = x0.to_vec();
        let mut out = x.clone();
        for j in 0..w.n() {
            let (w1, w2) = (w.block(j)[0], w.block(j)[1]);
            let inc = half * (x[0] * w2 - x[1] * w1) + a.block(j)[0];
            x[2] += inc;
            x[0] += w1;
            x[1] += w2;
            out.extend_from_slice(&x);
        }
        out
    });
    Ok(Benchmark {
        name: "levy_area",
        system,
        x0: vec![T::zero(); 3],
        facts: Facts { logode_exact: true, milstein_exact: true, ..Facts::default() },
        invariants: vec![],
        exact: Some(exact),
    })
}

/// Ito system `dx_1 = x_2 dW, dx_2 = -x_1 dW`; `|x|^2 = e^t` along solutions.
fn rotation<T: Scalar>() -> Result<Benchmark<T>> {
    let m = vec![T::zero(), T::one(), -T::one(), T::zero()];
    let system = VectorFieldSystem::linear(2, vec![m])?.with_ito_drift(field(|_: &[T], o: &mut [T]| o.fill(T::zero())));
    let exact: ExactFn<T> = Arc::new(|w, _, x0| {
        running(w, 0)
            .iter()
            .enumerate()
            .flat_map(|(j, wt)| {
                let scale = (c::<T>(0.5) * w.h() * T::of_usize(j)).exp();
                rotate(-*wt, x0).map(|v| v * scale)
            })
            .collect()
    });
    Ok(Benchmark {
        name: "rotation",
        system,
        x0: vec![T::one(), T::zero()],
        facts: Facts { logode_exact: true, commuting: true, ..Facts::default() },
        invariants: vec![Invariant { name: "norm-squared-minus-exp-t", g: Arc::new(|t: T, x: &[T]| x[0] * x[0] + x[1] * x[1] - t.exp()) }],
        exact: Some(exact),
    })
}

/// Brownian motion on the unit circle, `dx = J x o dW`.
fn circle<T: Scalar>() -> Result<Benchmark<T>> {
    let system = VectorFieldSystem::linear(2, vec![vec![T::zero(), -T::one(), T::one(), T::zero()]])?;
    let exact: ExactFn<T> = Arc::new(|w, _, x0| running(w, 0).iter().flat_map(|wt| rotate(*wt, x0)).collect());
    Ok(Benchmark {
        name: "circle",
        system,
        x0: vec![T::one(), T::zero()],
        facts: Facts { logode_exact: true, commuting: true, ..Facts::default() },
        invariants: vec![Invariant { name: "radius-squared-minus-one", g: Arc::new(|_: T, x: &[T]| x[0] * x[0] + x[1] * x[1] - T::one()) }],
        exact: Some(exact),
    })
}

/// `dx = dW - x^3 dt`.
fn cubic_drift<T: Scalar>() -> Result<Benchmark<T>> {
    let system = VectorFieldSystem::new(1, vec![field(|_: &[T], o: &mut [T]| o[0] = T::one())])?
        .with_jacobians(vec![jac(|_: &[T], o: &mut [T]| o[0] = T::zero())])?
        .with_ito_drift(field(|x: &[T], o: &mut [T]| o[0] = -x[0] * x[0] * x[0]));
    Ok(Benchmark {
        name: "cubic_drift",
        system,
        x0: vec![T::zero()],
        facts: Facts { commuting: true, euler_moments_diverge: true, ..Facts::default() },
        invariants: vec![],
        exact: None,
    })
}

/// Stratonovich `dx = x o dW`, solved by `x_0 e^{W_t}`.
fn linear_1d<T: Scalar>() -> Result<Benchmark<T>> {
    let system = VectorFieldSystem::linear(1, vec![vec![T::one()]])?;
    let exact: ExactFn<T> = Arc::new(|w, _, x0| running(w, 0).iter().map(|wt| x0[0] * wt.exp()).collect());
    Ok(Benchmark {
        name: "linear_1d",
        system,
        x0: vec![T::one()],
        facts: Facts { logode_exact: true, commuting: true, ..Facts::default() },
        invariants: vec![],
        exact: Some(exact),
    })
}

/// Commuting linear fields: a rotation and a dilation.
fn commuting<T: Scalar>() -> Result<Benchmark<T>> {
    let half = c::<T>(0.5);
    let system = VectorFieldSystem::linear(
        2,
        vec![vec![T::zero(), -T::one(), T::one(), T::zero()], vec![half, T::zero(), T::zero(), half]],
    )?;
    let exact: ExactFn<T> = Arc::new(move |w, _, x0| {
        running(w, 0)
            .iter()
            .zip(running(w, 1))
            .flat_map(|(a, b)| rotate(*a, x0).map(|v| v * (half * b).exp()))
            .collect()
    });
    Ok(Benchmark {
        name: "commuting",
        system,
        x0: vec![T::one(), c(0.5)],
        facts: Facts { logode_exact: true, commuting: true, ..Facts::default() },
        invariants: vec![],
        exact: Some(exact),
    })
}

/// Bounded, smooth, non-commuting fields on R^2 with a Stratonovich drift.
fn smooth_2d<T: Scalar>() -> Result<Benchmark<T>> {
    let (a, b) = (c::<T>(0.5), c::<T>(0.2));
    let q = c::<T>(0.25);
    let system = VectorFieldSystem::new(
        2,
        vec![
            field(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[T::one(), a * x[0].sin()])),
            field(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[a * x[1].cos(), T::one()])),
        ],
    )?
    .with_jacobians(vec![
        jac(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[T::zero(), T::zero(), a * x[0].cos(), T::zero()])),
        jac(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[T::zero(), -a * x[1].sin(), T::zero(), T::zero()])),
    ])?
    .with_brackets(vec![field(move |x: &[T], o: &mut [T]| {
        o.copy_from_slice(&[-q * x[0].sin() * x[1].sin(), -q * x[0].cos() * x[1].cos()])
    })])?
    .with_drift(field(move |x: &[T], o: &mut [T]| o.copy_from_slice(&[b * x[1].cos(), -b * x[0].sin()])));
    Ok(Benchmark {
        name: "smooth_2d",
        system,
        x0: vec![c(0.3), c(-0.2)],
        facts: Facts::default(),
        invariants: vec![],
        exact: None,
    })
}

pub fn benchmark<T: Scalar>(name: &str) -> Result<Benchmark<T>> {
    match name {
        "levy_area" => levy_area(),
        "rotation" => rotation(),
        "circle" => circle(),
        "cubic_drift" => cubic_drift(),
        "linear_1d" => linear_1d(),
        "commuting" => commuting(),
        "smooth_2d" => smooth_2d(),
        _ => Err(Error::InvalidParameter(format!("unknown benchmark {name:?}; known: {}", BENCHMARKS.join(", ")))),
    }
}
