//! Pathwise approximation of SDEs with level-2 log-ODE schemes.
//!
//! * [`tensor`]: truncated tensor algebra, free nilpotent Lie group, BCH.
//! * [`rough_path`]: piecewise abelian rough paths, lifts, p-variation metrics.
//! * [`coupling`]: Brownian and Levy-area sampling, dyadic area couplings.
//! * [`sde`]: vector fields, flow solver and the Euler/Milstein/Davie/log-ODE schemes.
//! * [`analysis`]: benchmark systems and error estimators.

pub mod analysis;
pub mod coupling;
pub mod error;
pub mod scalar;
pub mod sde;
pub mod rough_path;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor = tensor::TruncatedTensor<f64>;
pub type Lie = tensor::LieElement<f64>;
pub type Group = tensor::GroupElement<f64>;
pub type Path = rough_path::PAPath<f64>;
pub type Path32 = rough_path::PAPath<f32>;
pub type Tensor32 = tensor::TruncatedTensor<f32>;
pub type Lie32 = tensor::LieElement<f32>;
pub type Group32 = tensor::GroupElement<f32>;
