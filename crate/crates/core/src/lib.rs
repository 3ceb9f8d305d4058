//! Invariant submanifolds of stochastic partial differential equations.
//!
//! States live in a truncated Hermite–Sobolev scale (or on a Dirichlet grid),
//! submanifolds are given by one chart, and the crate checks the tangency
//! conditions for the diffusion fields and the corrected drift, then compares
//! the full Galerkin SPDE with the chart-reduced SDE by simulation.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod error;
pub mod function_space;
pub mod linalg;
pub mod manifold;
pub mod models;
pub mod scalar;
pub mod simulate;
pub mod tangency;

pub use error::{Error, Result};
pub use scalar::Real;

pub type State = function_space::SpectralState<f64>;
pub type Dual = function_space::DualField<f64>;
pub type Scale = function_space::NormScale<f64>;
pub type Submanifold = manifold::Manifold<f64>;
pub type Frame = manifold::TangentFrame<f64>;
pub type ItoModel = models::ItoTypeModel<f64>;
pub type PLaplace = models::PLaplaceModel<f64>;
pub type LinearEigen = models::LinearEigenModel<f64>;
pub type Trajectory = simulate::TrajectoryRecord<f64>;

pub type StateF32 = function_space::SpectralState<f32>;
pub type DualF32 = function_space::DualField<f32>;
pub type SubmanifoldF32 = manifold::Manifold<f32>;
pub type ItoModelF32 = models::ItoTypeModel<f32>;
pub type PLaplaceF32 = models::PLaplaceModel<f32>;
pub type LinearEigenF32 = models::LinearEigenModel<f32>;
